//! Skeleton rules for role identification and hand-mapped phrase rules.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::defparser::EdgeLabel;
use crate::error::{Error, Result};
use crate::model::{Resource, SemRole, TypeId};

pub const CORE_ROLE: &str = "CORE-ROLE";
pub const LIFT: &str = "LIFT";

/// One edge of a skeleton path: a specific role, or any core role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Core,
    Role(SemRole),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Core => f.write_str(CORE_ROLE),
            Step::Role(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Step {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == CORE_ROLE {
            Ok(Step::Core)
        } else {
            SemRole::new(&s).map(Step::Role).map_err(serde::de::Error::custom)
        }
    }
}

/// What a rule assigns: the label matched by the CORE-ROLE step, or a fixed role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emit {
    Lift,
    Role(SemRole),
}

impl fmt::Display for Emit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Emit::Lift => f.write_str(LIFT),
            Emit::Role(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Emit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Emit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == LIFT {
            Ok(Emit::Lift)
        } else {
            SemRole::new(&s).map(Emit::Role).map_err(serde::de::Error::custom)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonRule {
    pub id: String,
    /// Edge labels from the definition root down to the argument, OPERAND edges skipped.
    pub pattern: Vec<Step>,
    pub emits: Emit,
    /// Higher fires first.
    pub priority: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonRules {
    /// Roles matched by a CORE-ROLE step; role variants count as their canonical role.
    pub core_roles: Vec<SemRole>,
    pub rules: Vec<SkeletonRule>,
}

/// A hand-mapped phrasing: head predicate plus modifiers placed under `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseRule {
    pub head: TypeId,
    pub modifiers: Vec<TypeId>,
    pub target: TypeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub skeleton: SkeletonRules,
    pub phrase: Vec<PhraseRule>,
}

/// A rule firing on one path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Firing<'r> {
    pub rule: &'r SkeletonRule,
    pub role: SemRole,
}

impl SkeletonRules {
    pub fn is_core(&self, resource: &Resource, role: &SemRole) -> bool {
        let canon = resource.canonical_role(role);
        self.core_roles.iter().any(|c| c == canon)
    }

    /// Rules by descending priority.
    pub fn ordered(&self) -> Vec<&SkeletonRule> {
        let mut v: Vec<&SkeletonRule> = self.rules.iter().collect();
        v.sort_by_key(|r| std::cmp::Reverse(r.priority));
        v
    }

    /// The highest-priority rule matching `path` exactly. A path through a
    /// modifier edge never matches.
    pub fn fire(&self, resource: &Resource, path: &[EdgeLabel]) -> Option<Firing<'_>> {
        let roles: Vec<&SemRole> = path
            .iter()
            .filter(|l| **l != EdgeLabel::Operand)
            .map(|l| l.role())
            .collect::<Option<Vec<_>>>()?;
        self.ordered().into_iter().find_map(|rule| {
            if rule.pattern.len() != roles.len() {
                return None;
            }
            let mut lifted = None;
            for (step, role) in rule.pattern.iter().zip(&roles) {
                match step {
                    Step::Core if self.is_core(resource, role) => {
                        lifted.get_or_insert((*role).clone());
                    }
                    Step::Role(r) if r == *role => {}
                    _ => return None,
                }
            }
            let role = match &rule.emits {
                Emit::Role(r) => r.clone(),
                Emit::Lift => lifted?,
            };
            Some(Firing { rule, role })
        })
    }

    pub fn validate(&self, resource: &Resource) -> Result<()> {
        let vocab = &resource.vocabulary;
        let mut priorities = BTreeSet::new();
        let mut ids = BTreeSet::new();
        for r in &self.core_roles {
            vocab.check_role("skeleton core_roles", r)?;
        }
        for rule in &self.rules {
            let key = format!("skeleton rule {}", rule.id);
            if !priorities.insert(rule.priority) {
                return Err(Error::invalid(&key, format!("priority {} used twice", rule.priority)));
            }
            if !ids.insert(&rule.id) {
                return Err(Error::invalid(&key, "rule id used twice"));
            }
            if rule.pattern.is_empty() {
                return Err(Error::invalid(&key, "empty pattern"));
            }
            for step in &rule.pattern {
                if let Step::Role(r) = step {
                    vocab.check_role(&key, r)?;
                }
            }
            match &rule.emits {
                Emit::Role(r) => vocab.check_role(&key, r)?,
                Emit::Lift if !rule.pattern.contains(&Step::Core) => {
                    return Err(Error::invalid(&key, "LIFT needs a CORE-ROLE step"));
                }
                Emit::Lift => {}
            }
        }
        Ok(())
    }
}

impl PhraseRule {
    pub fn validate(&self, resource: &Resource) -> Result<()> {
        let key = format!("phrase rule {}", self.target);
        for t in std::iter::once(&self.head).chain(&self.modifiers).chain(std::iter::once(&self.target)) {
            if !resource.contains(t) {
                return Err(Error::Dangling {
                    key: key.clone(),
                    kind: "type",
                    target: t.to_string(),
                });
            }
        }
        let sibling = resource.get(&self.head)?.parent.is_some()
            && resource.get(&self.head)?.parent == resource.get(&self.target)?.parent;
        if !resource.subsumes(&self.head, &self.target)? && !sibling {
            return Err(Error::invalid(&key, "target is neither under the head nor its sibling"));
        }
        Ok(())
    }
}

impl RuleSet {
    pub fn validate(&self, resource: &Resource) -> Result<()> {
        self.skeleton.validate(resource)?;
        for p in &self.phrase {
            p.validate(resource)?;
        }
        Ok(())
    }
}
