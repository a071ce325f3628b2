use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of an ontology concept, always in `ONT::NAME` form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TypeId(String);

pub const ONT_PREFIX: &str = "ONT::";

impl TypeId {
    pub fn new(name: &str) -> Result<Self> {
        name.parse()
    }

    /// Accepts either `ONT::KILL` or a bare `KILL`, case-insensitively.
    pub fn lenient(name: &str) -> Result<Self> {
        let upper = name.trim().to_ascii_uppercase();
        if upper.starts_with(ONT_PREFIX) {
            upper.parse()
        } else {
            format!("{ONT_PREFIX}{upper}").parse()
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after `ONT::`.
    pub fn local_name(&self) -> &str {
        &self.0[ONT_PREFIX.len()..]
    }
}

impl FromStr for TypeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let local = s
            .strip_prefix(ONT_PREFIX)
            .ok_or_else(|| Error::syntax("type id", format!("{s:?} lacks the ONT:: prefix")))?;
        let ok = !local.is_empty()
            && local
                .chars()
                .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '-' || c == '_')
            && local.chars().next().is_some_and(|c| c.is_ascii_alphanumeric());
        if !ok {
            return Err(Error::syntax("type id", format!("{s:?} is not an uppercase identifier")));
        }
        Ok(TypeId(s.to_string()))
    }
}

impl TryFrom<String> for TypeId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TypeId> for String {
    fn from(t: TypeId) -> String {
        t.0
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A semantic role label (AGENT, AFFECTED, ...). Membership in the inventory
/// is checked against the resource vocabulary, not here.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SemRole(String);

impl SemRole {
    pub fn new(name: &str) -> Result<Self> {
        name.parse()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Lowercase variable spelling used in axioms (`?agent`).
    pub fn var_name(&self) -> String {
        self.0.to_ascii_lowercase()
    }
}

impl FromStr for SemRole {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        if upper.is_empty()
            || !upper
                .chars()
                .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '-')
        {
            return Err(Error::syntax("role", format!("{s:?} is not a role name")));
        }
        Ok(SemRole(upper))
    }
}

impl TryFrom<String> for SemRole {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SemRole> for String {
    fn from(r: SemRole) -> String {
        r.0
    }
}

impl fmt::Display for SemRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Well-known role names.
pub mod roles {
    pub const AGENT: &str = "AGENT";
    pub const AFFECTED: &str = "AFFECTED";
    pub const NEUTRAL: &str = "NEUTRAL";
    pub const NEUTRAL1: &str = "NEUTRAL1";
    pub const EXPERIENCER: &str = "EXPERIENCER";
    pub const FORMAL: &str = "FORMAL";
    pub const RESULT: &str = "RESULT";
    pub const FIGURE: &str = "FIGURE";
    pub const GROUND: &str = "GROUND";
    pub const COMPAR: &str = "COMPAR";
}

/// A WordNet sense key, `lemma%ss:ff:ii:head:hid`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SenseKey {
    key: String,
    split: usize,
}

impl SenseKey {
    pub fn new(key: &str) -> Result<Self> {
        key.parse()
    }

    pub fn as_str(&self) -> &str {
        &self.key
    }

    pub fn lemma(&self) -> &str {
        &self.key[..self.split]
    }

    fn fields(&self) -> Vec<&str> {
        self.key[self.split + 1..].split(':').collect()
    }

    /// The synset type digit: 1 noun, 2 verb, 3 adjective, 4 adverb, 5 satellite.
    pub fn ss_type(&self) -> u8 {
        self.fields()[0].parse().unwrap_or(0)
    }

    /// `ss`, `ff` and `ii` concatenated, e.g. `23500` for `pinion%2:35:00::`.
    pub fn compact_digits(&self) -> String {
        self.fields()[..3].concat()
    }
}

impl FromStr for SenseKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::syntax("sense key", format!("{s:?}: {why}"));
        let split = s.find('%').ok_or_else(|| bad("missing '%'"))?;
        let lemma = &s[..split];
        if lemma.is_empty() || lemma != lemma.to_lowercase() {
            return Err(bad("lemma must be non-empty lowercase"));
        }
        let fields: Vec<&str> = s[split + 1..].split(':').collect();
        if fields.len() != 5 {
            return Err(bad("expected five ':'-separated fields"));
        }
        let digits = |f: &str, n: usize| f.len() == n && f.chars().all(|c| c.is_ascii_digit());
        if !digits(fields[0], 1) || !matches!(fields[0], "1" | "2" | "3" | "4" | "5") {
            return Err(bad("synset type must be 1-5"));
        }
        if !digits(fields[1], 2) || !digits(fields[2], 2) {
            return Err(bad("lex file and lex id must be two digits"));
        }
        if !fields[4].is_empty() && !digits(fields[4], 2) {
            return Err(bad("head id must be empty or two digits"));
        }
        Ok(SenseKey {
            key: s.to_string(),
            split,
        })
    }
}

impl TryFrom<String> for SenseKey {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SenseKey> for String {
    fn from(k: SenseKey) -> String {
        k.key
    }
}

impl fmt::Display for SenseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

/// Part of speech of a lexical entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    V,
    N,
    Adj,
    Adv,
    P,
}

impl Pos {
    /// The part of speech encoded by a sense key's synset type digit.
    pub fn from_ss_type(ss: u8) -> Option<Pos> {
        match ss {
            1 => Some(Pos::N),
            2 => Some(Pos::V),
            3 | 5 => Some(Pos::Adj),
            4 => Some(Pos::Adv),
            _ => None,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pos::V => "v",
            Pos::N => "n",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
            Pos::P => "p",
        };
        f.write_str(s)
    }
}
