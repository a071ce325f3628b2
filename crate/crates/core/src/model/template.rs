use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::features::Vocabulary;
use super::ids::SemRole;
use crate::error::{Error, Result};

/// Grammatical relation between a verb and one of its arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Grel {
    Lsubj,
    Lobj,
    Liobj,
    Lcomp,
    Lobl,
}

impl fmt::Display for Grel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Grel::Lsubj => "LSUBJ",
            Grel::Lobj => "LOBJ",
            Grel::Liobj => "LIOBJ",
            Grel::Lcomp => "LCOMP",
            Grel::Lobl => "LOBL",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PhraseCat {
    Np,
    Pp,
    Cp,
    Adjp,
}

impl fmt::Display for PhraseCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PhraseCat::Np => "NP",
            PhraseCat::Pp => "PP",
            PhraseCat::Cp => "CP",
            PhraseCat::Adjp => "ADJP",
        };
        f.write_str(s)
    }
}

/// Phrase-type constraint on a slot: `(% CP (ctype s-to) (subj (var ?x)))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseSpec {
    pub cat: PhraseCat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ctype: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ptype: Vec<String>,
    /// Coindex variable naming the understood subject of the phrase.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subj: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub grel: Grel,
    pub constraint: PhraseSpec,
    pub role: SemRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coindex: Option<String>,
}

/// A named mapping from grammatical relations to semantic roles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingTemplate {
    pub name: String,
    pub slots: Vec<Slot>,
}

impl LinkingTemplate {
    /// Roles a word must have for this template to apply to it.
    pub fn required_roles(&self) -> BTreeSet<SemRole> {
        self.slots.iter().map(|s| s.role.clone()).collect()
    }

    pub fn subject(&self) -> Option<&Slot> {
        self.slots.iter().find(|s| s.grel == Grel::Lsubj)
    }

    /// Non-subject slots in surface order.
    pub fn complements(&self) -> impl Iterator<Item = &Slot> {
        self.slots.iter().filter(|s| s.grel != Grel::Lsubj)
    }

    pub fn slot_with_coindex(&self, var: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.coindex.as_deref() == Some(var))
    }

    pub fn validate(&self, vocab: &Vocabulary) -> Result<()> {
        let key = format!("template {}", self.name);
        let mut seen = BTreeSet::new();
        for slot in &self.slots {
            vocab.check_role(&key, &slot.role)?;
            if !seen.insert(&slot.role) {
                return Err(Error::invalid(&key, format!("role {} used by two slots", slot.role)));
            }
        }
        if self.subject().is_none() {
            return Err(Error::invalid(&key, "template has no LSUBJ slot"));
        }
        let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
        for slot in &self.slots {
            for var in slot.coindex.iter().chain(slot.constraint.subj.iter()) {
                *uses.entry(var.as_str()).or_default() += 1;
            }
        }
        if let Some((var, _)) = uses.iter().find(|(_, n)| **n < 2) {
            return Err(Error::invalid(&key, format!("coindex {var} appears in only one slot")));
        }
        Ok(())
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (% {}", self.grel, self.constraint.cat)?;
        if let Some(var) = &self.coindex {
            write!(f, " (var {var})")?;
        }
        if let Some(ctype) = &self.constraint.ctype {
            write!(f, " (ctype {ctype})")?;
        }
        if !self.constraint.ptype.is_empty() {
            write!(f, " (ptype {})", self.constraint.ptype.join(" "))?;
        }
        if let Some(subj) = &self.constraint.subj {
            write!(f, " (subj (var {subj}))")?;
        }
        write!(f, ") {}", self.role)
    }
}

impl fmt::Display for LinkingTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        for slot in &self.slots {
            writeln!(f, "  {slot}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subj_control() -> LinkingTemplate {
        LinkingTemplate {
            name: "EXPERIENCER-FORMAL-SUBJCONTROL-TEMPL".into(),
            slots: vec![
                Slot {
                    grel: Grel::Lsubj,
                    constraint: PhraseSpec {
                        cat: PhraseCat::Np,
                        ctype: None,
                        ptype: vec![],
                        subj: None,
                    },
                    role: SemRole::new("EXPERIENCER").unwrap(),
                    coindex: Some("?x".into()),
                },
                Slot {
                    grel: Grel::Lcomp,
                    constraint: PhraseSpec {
                        cat: PhraseCat::Cp,
                        ctype: Some("s-to".into()),
                        ptype: vec![],
                        subj: Some("?x".into()),
                    },
                    role: SemRole::new("FORMAL").unwrap(),
                    coindex: None,
                },
            ],
        }
    }

    #[test]
    fn renders_in_grammatical_relation_layout() {
        let text = subj_control().to_string();
        assert!(text.contains("LSUBJ (% NP (var ?x)) EXPERIENCER"));
        assert!(text.contains("LCOMP (% CP (ctype s-to) (subj (var ?x))) FORMAL"));
    }

    #[test]
    fn lonely_coindex_is_rejected() {
        let vocab = Vocabulary {
            features: vec![],
            roles: ["EXPERIENCER", "FORMAL"].iter().map(|r| SemRole::new(r).unwrap()).collect(),
            role_variants: Default::default(),
            event_root: crate::model::TypeId::new("ONT::SITUATION-ROOT").unwrap(),
        };
        let mut t = subj_control();
        assert!(t.validate(&vocab).is_ok());
        t.slots[1].constraint.subj = None;
        assert!(t.validate(&vocab).is_err());
    }
}
