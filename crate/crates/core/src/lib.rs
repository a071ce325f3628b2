//! Bootstraps a verb lexicon and event ontology from a seed resource and a
//! sense-tagged gloss corpus, and answers similarity and entailment queries
//! over the result.

pub mod cli;
pub mod corpus;
pub mod defparser;
pub mod error;
pub mod eval;
pub mod inference;
pub mod io;
pub mod learner;
pub mod logic;
pub mod mapping;
pub mod model;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
