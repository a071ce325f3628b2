use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while loading, validating or querying a resource.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown type {0}")]
    UnknownType(String),

    #[error("unknown synset {0}")]
    UnknownSynset(String),

    #[error("unknown template {0}")]
    UnknownTemplate(String),

    #[error("{key}: reference to missing {kind} {target}")]
    Dangling {
        key: String,
        kind: &'static str,
        target: String,
    },

    #[error("cycle in {what} through {key}")]
    Cycle { what: &'static str, key: String },

    #[error("duplicate mapping ({synset}, {ty}) listed more than once")]
    DuplicateMapping { synset: String, ty: String },

    #[error("{key}: role {role} is not in the declared role inventory")]
    UnknownRole { key: String, role: String },

    #[error("{key}: feature {attribute}={value} is not in the declared vocabulary")]
    UnknownFeature {
        key: String,
        attribute: String,
        value: String,
    },

    #[error("{key}: {message}")]
    Invalid { key: String, message: String },

    #[error("syntax error in {what}: {message}")]
    Syntax { what: &'static str, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{file}: {source}")]
    InFile {
        file: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn syntax(what: &'static str, message: impl Into<String>) -> Self {
        Error::Syntax {
            what,
            message: message.into(),
        }
    }

    pub(crate) fn in_file(self, file: impl Into<String>) -> Self {
        Error::InFile {
            file: file.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with file context peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { source, .. } => source.root(),
            other => other,
        }
    }
}
