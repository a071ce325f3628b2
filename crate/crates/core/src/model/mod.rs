//! Ontology, lexicon, templates and the immutable [`Resource`] that ties them together.

mod features;
mod ids;
mod template;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Deref;

use serde::{Deserialize, Serialize};

pub use features::{FeatureAttribute, FeatureDisplay, FeatureSet, Vocabulary};
pub use ids::{roles, Pos, SemRole, SenseKey, TypeId, ONT_PREFIX};
pub use template::{Grel, LinkingTemplate, PhraseCat, PhraseSpec, Slot};

use crate::error::{Error, Result};
use crate::logic::{Axiom, AxiomId};
use crate::mapping::Mapping;

/// Selectional preference on a role filler.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preference {
    Features(FeatureSet),
    Type(TypeId),
}

impl Preference {
    pub fn none() -> Self {
        Preference::Features(FeatureSet::new())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Preference::Features(f) if f.is_empty())
    }
}

impl Default for Preference {
    fn default() -> Self {
        Preference::none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleSpec {
    pub role: SemRole,
    #[serde(flatten)]
    pub preference: Preference,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub optional: bool,
}

impl RoleSpec {
    pub fn new(role: SemRole, preference: Preference) -> Self {
        RoleSpec {
            role,
            preference,
            optional: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Seed,
    /// Created by the bootstrap loop in the given iteration (1-based).
    Derived(u32),
}

/// An ontology concept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntType {
    #[serde(rename = "name")]
    pub id: TypeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<TypeId>,
    #[serde(rename = "arguments", default)]
    pub roles: Vec<RoleSpec>,
    #[serde(default)]
    pub axioms: Vec<AxiomId>,
    #[serde(rename = "wn", default)]
    pub synsets: Vec<SenseKey>,
    #[serde(default)]
    pub provenance: Provenance,
    /// Marks a state (as opposed to an event) predicate; inherited.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stative: bool,
    /// Semantic features of entities of this type; inherited, local values win.
    #[serde(default, skip_serializing_if = "FeatureSet::is_empty")]
    pub features: FeatureSet,
}

impl OntType {
    pub fn new(id: TypeId, parent: Option<TypeId>) -> Self {
        OntType {
            id,
            parent,
            roles: Vec::new(),
            axioms: Vec::new(),
            synsets: Vec::new(),
            provenance: Provenance::Seed,
            stative: false,
            features: FeatureSet::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexSense {
    #[serde(rename = "type")]
    pub ty: TypeId,
    pub templates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub word: String,
    pub pos: Pos,
    pub senses: Vec<LexSense>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexKey {
    pub word: String,
    pub pos: Pos,
}

impl LexEntry {
    pub fn key(&self) -> LexKey {
        LexKey {
            word: self.word.clone(),
            pos: self.pos,
        }
    }
}

/// The raw contents of a resource, before validation.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceData {
    pub vocabulary: Vocabulary,
    pub ontology: BTreeMap<TypeId, OntType>,
    pub lexicon: BTreeMap<LexKey, LexEntry>,
    pub templates: BTreeMap<String, LinkingTemplate>,
    pub axioms: BTreeMap<AxiomId, Axiom>,
    pub mappings: Vec<Mapping>,
}

/// A validated, referentially closed ontology + lexicon snapshot.
///
/// Immutable once built; changes go through [`Resource::data`] clones and a
/// fresh [`Resource::new`].
#[derive(Clone, Debug)]
pub struct Resource {
    data: ResourceData,
    root: TypeId,
    children: BTreeMap<TypeId, Vec<TypeId>>,
    depth: HashMap<TypeId, usize>,
}

impl PartialEq for Resource {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl Deref for Resource {
    type Target = ResourceData;
    fn deref(&self) -> &ResourceData {
        &self.data
    }
}

impl Resource {
    pub fn new(data: ResourceData) -> Result<Self> {
        let root = validate_tree(&data.ontology)?;
        let mut children: BTreeMap<TypeId, Vec<TypeId>> = BTreeMap::new();
        for t in data.ontology.values() {
            if let Some(p) = &t.parent {
                children.entry(p.clone()).or_default().push(t.id.clone());
            }
        }
        let mut depth = HashMap::new();
        let mut stack = vec![(root.clone(), 0usize)];
        while let Some((t, d)) = stack.pop() {
            depth.insert(t.clone(), d);
            for c in children.get(&t).into_iter().flatten() {
                stack.push((c.clone(), d + 1));
            }
        }
        let resource = Resource {
            data,
            root,
            children,
            depth,
        };
        resource.check_closure()?;
        Ok(resource)
    }

    pub fn data(&self) -> &ResourceData {
        &self.data
    }

    pub fn into_data(self) -> ResourceData {
        self.data
    }

    pub fn root(&self) -> &TypeId {
        &self.root
    }

    pub fn contains(&self, t: &TypeId) -> bool {
        self.data.ontology.contains_key(t)
    }

    pub fn get(&self, t: &TypeId) -> Result<&OntType> {
        self.data
            .ontology
            .get(t)
            .ok_or_else(|| Error::UnknownType(t.to_string()))
    }

    pub fn children(&self, t: &TypeId) -> &[TypeId] {
        self.children.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of parent edges between `t` and the root.
    pub fn depth(&self, t: &TypeId) -> Result<usize> {
        self.depth
            .get(t)
            .copied()
            .ok_or_else(|| Error::UnknownType(t.to_string()))
    }

    /// `t` followed by its ancestors, ending at the root.
    pub fn ancestors(&self, t: &TypeId) -> Result<Vec<&TypeId>> {
        let mut out = vec![&self.get(t)?.id];
        let mut cur = self.get(t)?;
        while let Some(p) = &cur.parent {
            cur = self.get(p)?;
            out.push(&cur.id);
        }
        Ok(out)
    }

    /// True iff `ancestor` lies on the parent chain of `descendant` (inclusive).
    pub fn subsumes(&self, ancestor: &TypeId, descendant: &TypeId) -> Result<bool> {
        let da = self.depth(ancestor)?;
        let dd = self.depth(descendant)?;
        if da > dd {
            return Ok(false);
        }
        let mut cur = descendant;
        for _ in 0..(dd - da) {
            cur = self.data.ontology[cur].parent.as_ref().expect("non-root has parent");
        }
        Ok(cur == ancestor)
    }

    pub fn comparable(&self, a: &TypeId, b: &TypeId) -> Result<bool> {
        Ok(self.subsumes(a, b)? || self.subsumes(b, a)?)
    }

    /// Local roles first, then inherited ones by ascending ancestor distance;
    /// a nearer declaration of a role hides farther ones.
    pub fn effective_roles(&self, t: &TypeId) -> Result<Vec<RoleSpec>> {
        let mut out: Vec<RoleSpec> = Vec::new();
        for ty in self.ancestors(t)? {
            for spec in &self.data.ontology[ty].roles {
                if out.iter().all(|s| s.role != spec.role) {
                    out.push(spec.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn role_spec(&self, t: &TypeId, role: &SemRole) -> Result<Option<RoleSpec>> {
        Ok(self.effective_roles(t)?.into_iter().find(|s| &s.role == role))
    }

    /// Entity features of `t`, inherited through the parent chain.
    pub fn type_features(&self, t: &TypeId) -> Result<FeatureSet> {
        let mut acc = FeatureSet::new();
        for ty in self.ancestors(t)?.into_iter().rev() {
            acc = self.data.ontology[ty].features.overlay_on(&acc);
        }
        Ok(acc)
    }

    pub fn preference_features(&self, pref: &Preference) -> Result<FeatureSet> {
        match pref {
            Preference::Features(f) => Ok(f.clone()),
            Preference::Type(t) => self.type_features(t),
        }
    }

    /// Soft compatibility of two preferences: their feature sets must not
    /// conflict, and two type restrictions must be comparable.
    pub fn preferences_compatible(&self, a: &Preference, b: &Preference) -> Result<bool> {
        if let (Preference::Type(x), Preference::Type(y)) = (a, b) {
            if !self.comparable(x, y)? {
                return Ok(false);
            }
        }
        let fa = self.preference_features(a)?;
        let fb = self.preference_features(b)?;
        self.data.vocabulary.feature_compatible(&fa, &fb)
    }

    pub fn is_stative(&self, t: &TypeId) -> Result<bool> {
        Ok(self.ancestors(t)?.iter().any(|a| self.data.ontology[*a].stative))
    }

    /// An event type: inside the event region and not stative.
    pub fn is_event(&self, t: &TypeId) -> Result<bool> {
        let root = &self.data.vocabulary.event_root;
        Ok(self.contains(root) && self.subsumes(root, t)? && !self.is_stative(t)?)
    }

    pub fn entry(&self, word: &str, pos: Pos) -> Option<&LexEntry> {
        self.data.lexicon.get(&LexKey {
            word: word.to_string(),
            pos,
        })
    }

    pub fn entries_for<'a>(&'a self, word: &'a str) -> impl Iterator<Item = &'a LexEntry> + 'a {
        self.data
            .lexicon
            .range(
                LexKey {
                    word: word.to_string(),
                    pos: Pos::V,
                }..,
            )
            .take_while(move |(k, _)| k.word == word)
            .map(|(_, e)| e)
    }

    pub fn template(&self, name: &str) -> Result<&LinkingTemplate> {
        self.data
            .templates
            .get(name)
            .ok_or_else(|| Error::UnknownTemplate(name.to_string()))
    }

    /// Lexicon (word, sense) pairs whose type is `t` or one of its descendants.
    pub fn senses_under<'a>(&'a self, t: &'a TypeId) -> impl Iterator<Item = (&'a LexEntry, &'a LexSense)> + 'a {
        self.data.lexicon.values().flat_map(move |e| {
            e.senses
                .iter()
                .filter(move |s| self.subsumes(t, &s.ty).unwrap_or(false))
                .map(move |s| (e, s))
        })
    }

    /// Sense keys already attached to some ontology type.
    pub fn incorporated_keys(&self) -> BTreeSet<&SenseKey> {
        self.data.ontology.values().flat_map(|t| t.synsets.iter()).collect()
    }

    pub fn canonical_role<'a>(&'a self, role: &'a SemRole) -> &'a SemRole {
        self.data.vocabulary.canonical_role(role)
    }

    fn check_type_ref(&self, key: &str, t: &TypeId) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Dangling {
                key: key.to_string(),
                kind: "type",
                target: t.to_string(),
            })
        }
    }

    /// Exhaustive scan for dangling references and vocabulary violations.
    fn check_closure(&self) -> Result<()> {
        let d = &self.data;
        let vocab = &d.vocabulary;
        for role in vocab.role_variants.keys().chain(vocab.role_variants.values()) {
            vocab.check_role("vocabulary role_variants", role)?;
        }
        for t in d.ontology.values() {
            let key = format!("type {}", t.id);
            for spec in &t.roles {
                vocab.check_role(&key, &spec.role)?;
                match &spec.preference {
                    Preference::Features(f) => vocab.check_features(&key, f)?,
                    Preference::Type(p) => self.check_type_ref(&key, p)?,
                }
            }
            let mut seen = BTreeSet::new();
            for spec in &t.roles {
                if !seen.insert(&spec.role) {
                    return Err(Error::invalid(&key, format!("role {} declared twice", spec.role)));
                }
            }
            vocab.check_features(&key, &t.features)?;
            for a in &t.axioms {
                if !d.axioms.contains_key(a) {
                    return Err(Error::Dangling {
                        key: key.clone(),
                        kind: "axiom",
                        target: a.to_string(),
                    });
                }
            }
            if matches!(t.provenance, Provenance::Derived(_)) && t.synsets.is_empty() {
                return Err(Error::invalid(&key, "derived type without source synsets"));
            }
        }
        for e in d.lexicon.values() {
            let key = format!("lexicon {} ({})", e.word, e.pos);
            for s in &e.senses {
                self.check_type_ref(&key, &s.ty)?;
                for name in &s.templates {
                    if !d.templates.contains_key(name) {
                        return Err(Error::Dangling {
                            key: key.clone(),
                            kind: "template",
                            target: name.clone(),
                        });
                    }
                }
            }
        }
        for t in d.templates.values() {
            t.validate(vocab)?;
        }
        for a in d.axioms.values() {
            let key = format!("axiom {}", a.id);
            self.check_type_ref(&key, &a.antecedent.ty)?;
            for (role, _) in &a.antecedent.vars {
                vocab.check_role(&key, role)?;
            }
            for t in a.consequent.types() {
                self.check_type_ref(&key, &t)?;
            }
            a.check_closed()?;
        }
        let mut pairs = BTreeSet::new();
        for m in &d.mappings {
            self.check_type_ref(&format!("mapping {}", m.synset), &m.ty)?;
            if !pairs.insert((&m.synset, &m.ty)) {
                return Err(Error::DuplicateMapping {
                    synset: m.synset.clone(),
                    ty: m.ty.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Single root, no dangling parents, no cycles. Returns the root.
fn validate_tree(ontology: &BTreeMap<TypeId, OntType>) -> Result<TypeId> {
    let roots: Vec<&TypeId> = ontology
        .values()
        .filter(|t| t.parent.is_none())
        .map(|t| &t.id)
        .collect();
    for t in ontology.values() {
        if let Some(p) = &t.parent {
            if !ontology.contains_key(p) {
                return Err(Error::Dangling {
                    key: format!("type {}", t.id),
                    kind: "parent type",
                    target: p.to_string(),
                });
            }
        }
    }
    // Walk every chain; a chain longer than the ontology is a cycle.
    for t in ontology.values() {
        let mut cur = t;
        let mut steps = 0;
        while let Some(p) = &cur.parent {
            steps += 1;
            if steps > ontology.len() {
                return Err(Error::Cycle {
                    what: "type hierarchy",
                    key: t.id.to_string(),
                });
            }
            cur = &ontology[p];
        }
    }
    match roots.as_slice() {
        [root] => Ok((*root).clone()),
        [] => Err(Error::invalid("ontology", "no root type")),
        many => Err(Error::invalid(
            "ontology",
            format!("{} root types: {}", many.len(), many.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(", ")),
        )),
    }
}
