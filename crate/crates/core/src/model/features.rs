use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ids::{SemRole, TypeId};
use crate::error::{Error, Result};

/// A set of `attribute=value` pairs, at most one value per attribute.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSet(BTreeMap<String, String>);

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, attribute: &str, value: &str) -> Self {
        self.0.insert(attribute.to_string(), value.to_string());
        self
    }

    pub fn insert(&mut self, attribute: &str, value: &str) -> Option<String> {
        self.0.insert(attribute.to_string(), value.to_string())
    }

    pub fn remove(&mut self, attribute: &str) -> Option<String> {
        self.0.remove(attribute)
    }

    pub fn get(&self, attribute: &str) -> Option<&str> {
        self.0.get(attribute).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, v)| (a.as_str(), v.as_str()))
    }

    /// Soft compatibility: no attribute carries two different values.
    /// Attributes missing on either side never conflict.
    pub fn compatible_with(&self, candidate: &FeatureSet) -> bool {
        self.0
            .iter()
            .all(|(attr, value)| candidate.0.get(attr).is_none_or(|v| v == value))
    }

    /// Fill in attributes from `inherited` that are not set locally.
    pub fn overlay_on(&self, inherited: &FeatureSet) -> FeatureSet {
        let mut merged = inherited.clone();
        for (a, v) in &self.0 {
            merged.0.insert(a.clone(), v.clone());
        }
        merged
    }
}

impl FromIterator<(String, String)> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        FeatureSet(iter.into_iter().collect())
    }
}

/// How an attribute is spelled in the bracketed display form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureDisplay {
    /// `ORIGIN=NATURAL`
    #[default]
    Pair,
    /// `PHYS-OBJ` (the value alone)
    Bare,
    /// `LIVING+`
    Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureAttribute {
    pub name: String,
    pub values: Vec<String>,
    #[serde(default)]
    pub display: FeatureDisplay,
}

/// Seed-supplied inventories: feature attributes, role names, role variants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub features: Vec<FeatureAttribute>,
    pub roles: Vec<SemRole>,
    /// Variant role name -> canonical role name (AGENT1 -> AGENT).
    #[serde(default)]
    pub role_variants: BTreeMap<SemRole, SemRole>,
    /// Root of the event/situation region of the ontology.
    pub event_root: TypeId,
}

impl Vocabulary {
    pub fn attribute(&self, name: &str) -> Option<&FeatureAttribute> {
        self.features.iter().find(|a| a.name == name)
    }

    pub fn has_role(&self, role: &SemRole) -> bool {
        self.roles.contains(role)
    }

    pub fn canonical_role<'a>(&'a self, role: &'a SemRole) -> &'a SemRole {
        self.role_variants.get(role).unwrap_or(role)
    }

    pub fn check_role(&self, key: &str, role: &SemRole) -> Result<()> {
        if self.has_role(role) {
            Ok(())
        } else {
            Err(Error::UnknownRole {
                key: key.to_string(),
                role: role.to_string(),
            })
        }
    }

    pub fn check_features(&self, key: &str, features: &FeatureSet) -> Result<()> {
        for (attr, value) in features.iter() {
            let known = self
                .attribute(attr)
                .is_some_and(|a| a.values.iter().any(|v| v == value));
            if !known {
                return Err(Error::UnknownFeature {
                    key: key.to_string(),
                    attribute: attr.to_string(),
                    value: value.to_string(),
                });
            }
        }
        Ok(())
    }

    /// `feature_compatible` with vocabulary validation of both sides.
    pub fn feature_compatible(&self, pref: &FeatureSet, candidate: &FeatureSet) -> Result<bool> {
        self.check_features("preference", pref)?;
        self.check_features("candidate", candidate)?;
        Ok(pref.compatible_with(candidate))
    }

    /// Parses the display form (`{PHYS-OBJ ORIGIN=NATURAL LIVING+}`); braces optional.
    pub fn parse_features(&self, text: &str) -> Result<FeatureSet> {
        let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
        let mut set = FeatureSet::new();
        for item in inner.split_whitespace() {
            let (attr, value) = if let Some((a, v)) = item.split_once('=') {
                (a.to_string(), v.to_string())
            } else if let Some(stem) = item.strip_suffix('+') {
                (stem.to_string(), "+".to_string())
            } else if let Some(stem) = item.strip_suffix('-').filter(|s| self.attribute(s).is_some()) {
                (stem.to_string(), "-".to_string())
            } else {
                let attr = self
                    .features
                    .iter()
                    .find(|a| a.display == FeatureDisplay::Bare && a.values.iter().any(|v| v == item))
                    .ok_or_else(|| Error::syntax("feature set", format!("cannot place bare value {item}")))?;
                (attr.name.clone(), item.to_string())
            };
            if set.insert(&attr, &value).is_some() {
                return Err(Error::syntax("feature set", format!("attribute {attr} given twice")));
            }
        }
        self.check_features("feature set", &set)?;
        Ok(set)
    }

    /// Renders in the `{PHYS-OBJ ORIGIN=NATURAL}` layout, bare values first.
    pub fn format_features(&self, set: &FeatureSet) -> String {
        let display = |attr: &str| self.attribute(attr).map(|a| a.display).unwrap_or_default();
        let mut items: Vec<(u8, String)> = set
            .iter()
            .map(|(attr, value)| match display(attr) {
                FeatureDisplay::Bare => (0, value.to_string()),
                FeatureDisplay::Sign => (1, format!("{attr}{value}")),
                FeatureDisplay::Pair => (1, format!("{attr}={value}")),
            })
            .collect();
        items.sort();
        let mut out = String::from("{");
        for (i, (_, s)) in items.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{s}");
        }
        out.push('}');
        out
    }
}
