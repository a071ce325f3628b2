//! Synset-to-type mappings and the hybrid hierarchy used for similarity.
//!
//! Synsets hang below ontology types: a mapped synset's parent is its type,
//! an unmapped synset's parent is the hypernym closest to a mapped synset
//! (ties broken by smallest synset id).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{Resource, TypeId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MappingKind {
    #[default]
    Direct,
    Remapped,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MappingProvenance {
    #[default]
    Seed,
    Repair,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mapping {
    pub synset: String,
    #[serde(rename = "type")]
    pub ty: TypeId,
    #[serde(default)]
    pub kind: MappingKind,
    #[serde(default)]
    pub provenance: MappingProvenance,
}

/// Depth conventions, echoed in similarity output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DepthModel {
    pub root_depth: usize,
    pub mapping_hop_cost: usize,
    pub hypernym_hop_cost: usize,
}

pub const DEPTH_MODEL: DepthModel = DepthModel {
    root_depth: 1,
    mapping_hop_cost: 1,
    hypernym_hop_cost: 1,
};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum HybridNode {
    Type(TypeId),
    Synset(String),
}

impl fmt::Display for HybridNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HybridNode::Type(t) => write!(f, "{t}"),
            HybridNode::Synset(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolved {
    #[serde(rename = "type")]
    pub ty: TypeId,
    pub hops: usize,
    /// The mapped synset reached by the walk.
    pub via: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Duplicate {
    pub synset: String,
    pub types: Vec<TypeId>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Similarity {
    pub score: f64,
    pub a: HybridNode,
    pub b: HybridNode,
    pub lcs: HybridNode,
}

/// Every synset mapped to two or more distinct types, in synset order.
pub fn detect_duplicates(mappings: &[Mapping]) -> Vec<Duplicate> {
    let mut by_synset: BTreeMap<&str, BTreeSet<&TypeId>> = BTreeMap::new();
    for m in mappings {
        by_synset.entry(&m.synset).or_default().insert(&m.ty);
    }
    by_synset
        .into_iter()
        .filter(|(_, ts)| ts.len() >= 2)
        .map(|(s, ts)| Duplicate {
            synset: s.to_string(),
            types: ts.into_iter().cloned().collect(),
        })
        .collect()
}

/// Read-only view over a resource and corpus as one hierarchy.
pub struct Hybrid<'a> {
    pub resource: &'a Resource,
    pub corpus: &'a Corpus,
    direct: HashMap<&'a str, TypeId>,
}

impl<'a> Hybrid<'a> {
    pub fn new(resource: &'a Resource, corpus: &'a Corpus) -> Self {
        let mut direct: HashMap<&'a str, TypeId> = HashMap::new();
        for m in &resource.mappings {
            if let Some(id) = corpus.resolve_id(&m.synset) {
                // Duplicates are reported, not repaired; take the smallest type.
                let slot = direct.entry(id).or_insert_with(|| m.ty.clone());
                if m.ty < *slot {
                    *slot = m.ty.clone();
                }
            }
        }
        Hybrid {
            resource,
            corpus,
            direct,
        }
    }

    pub fn direct_type(&self, synset: &str) -> Option<&TypeId> {
        self.corpus.resolve_id(synset).and_then(|id| self.direct.get(id))
    }

    /// Hops from `synset` to the nearest directly mapped synset.
    fn mapped_distance(&self, synset: &str) -> Option<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([(synset, 0usize)]);
        while let Some((id, d)) = queue.pop_front() {
            if self.direct.contains_key(id) {
                return Some(d);
            }
            for h in self.corpus.hypernyms(id).ok()? {
                if seen.insert(h) {
                    queue.push_back((h, d + 1));
                }
            }
        }
        None
    }

    fn synset_parent(&self, id: &'a str) -> Option<HybridNode> {
        if let Some(t) = self.direct.get(id) {
            return Some(HybridNode::Type(t.clone()));
        }
        self.corpus
            .hypernyms(id)
            .ok()?
            .into_iter()
            .filter_map(|h| self.mapped_distance(h).map(|d| (d, h)))
            .min()
            .map(|(_, h)| HybridNode::Synset(h.to_string()))
    }

    pub fn parent(&self, node: &HybridNode) -> Result<Option<HybridNode>> {
        match node {
            HybridNode::Type(t) => Ok(self.resource.get(t)?.parent.clone().map(HybridNode::Type)),
            HybridNode::Synset(s) => {
                let id = self.canonical(s)?;
                self.synset_parent(id)
                    .map(Some)
                    .ok_or_else(|| Error::invalid(format!("synset {s}"), "no mapped ancestor"))
            }
        }
    }

    fn canonical(&self, synset: &str) -> Result<&'a str> {
        self.corpus
            .resolve_id(synset)
            .ok_or_else(|| Error::UnknownSynset(synset.to_string()))
    }

    /// Nearest mapped type: hops=0 for a direct mapping, else hypernym hops
    /// along the parent chain. `None` when no ancestor is mapped.
    pub fn resolve_mapping(&self, synset: &str) -> Result<Option<Resolved>> {
        let mut id = self.canonical(synset)?;
        let mut hops = 0;
        loop {
            match self.synset_parent(id) {
                None => return Ok(None),
                Some(HybridNode::Type(ty)) => {
                    return Ok(Some(Resolved {
                        ty,
                        hops,
                        via: id.to_string(),
                    }))
                }
                Some(HybridNode::Synset(next)) => {
                    id = self.canonical(&next)?;
                    hops += 1;
                }
            }
        }
    }

    /// Normalise and check that a node is part of the hierarchy.
    pub fn node(&self, node: &HybridNode) -> Result<HybridNode> {
        match node {
            HybridNode::Type(t) => {
                self.resource.get(t)?;
                Ok(node.clone())
            }
            HybridNode::Synset(s) => {
                let id = self.canonical(s)?;
                if self.synset_parent(id).is_none() {
                    return Err(Error::invalid(format!("synset {s}"), "no mapped ancestor"));
                }
                Ok(HybridNode::Synset(id.to_string()))
            }
        }
    }

    /// `node` first, root type last.
    pub fn ancestors(&self, node: &HybridNode) -> Result<Vec<HybridNode>> {
        let mut out = vec![self.node(node)?];
        while let Some(p) = self.parent(out.last().expect("non-empty"))? {
            out.push(p);
        }
        Ok(out)
    }

    pub fn hybrid_depth(&self, node: &HybridNode) -> Result<usize> {
        match self.node(node)? {
            HybridNode::Type(t) => Ok(self.resource.depth(&t)? + DEPTH_MODEL.root_depth),
            HybridNode::Synset(s) => {
                let r = self.resolve_mapping(&s)?.expect("node() checked resolvability");
                Ok(self.resource.depth(&r.ty)?
                    + DEPTH_MODEL.root_depth
                    + DEPTH_MODEL.mapping_hop_cost
                    + r.hops * DEPTH_MODEL.hypernym_hop_cost)
            }
        }
    }

    /// Deepest node shared by both ancestor chains.
    pub fn lcs(&self, a: &HybridNode, b: &HybridNode) -> Result<HybridNode> {
        let chain_b: BTreeSet<HybridNode> = self.ancestors(b)?.into_iter().collect();
        self.ancestors(a)?
            .into_iter()
            .find(|n| chain_b.contains(n))
            .ok_or_else(|| Error::invalid("hierarchy", "nodes share no ancestor"))
    }

    pub fn wup(&self, a: &HybridNode, b: &HybridNode) -> Result<f64> {
        let lcs = self.lcs(a, b)?;
        let num = 2 * self.hybrid_depth(&lcs)?;
        let den = self.hybrid_depth(a)? + self.hybrid_depth(b)?;
        Ok(num as f64 / den as f64)
    }

    /// Lexicon types for the lemma plus resolvable corpus synsets containing it.
    pub fn sense_nodes(&self, lemma: &str) -> Vec<HybridNode> {
        let mut out = BTreeSet::new();
        for e in self.resource.entries_for(lemma) {
            for s in &e.senses {
                out.insert(HybridNode::Type(s.ty.clone()));
            }
        }
        for s in self.corpus.synsets_with_lemma(lemma) {
            if self.synset_parent(&s.id).is_some() {
                out.insert(HybridNode::Synset(s.id.clone()));
            }
        }
        out.into_iter().collect()
    }

    /// Best WuP score over all sense pairs; the first maximal pair is the witness.
    pub fn word_similarity(&self, w1: &str, w2: &str) -> Result<Similarity> {
        let s1 = self.sense_nodes(w1);
        let s2 = self.sense_nodes(w2);
        for (w, s) in [(w1, &s1), (w2, &s2)] {
            if s.is_empty() {
                return Err(Error::invalid(format!("word {w}"), "no senses in resource or corpus"));
            }
        }
        let mut best: Option<Similarity> = None;
        for a in &s1 {
            for b in &s2 {
                let score = self.wup(a, b)?;
                if best.as_ref().is_none_or(|x| score > x.score) {
                    best = Some(Similarity {
                        score,
                        a: a.clone(),
                        b: b.clone(),
                        lcs: self.lcs(a, b)?,
                    });
                }
            }
        }
        Ok(best.expect("both sides non-empty"))
    }

    /// Parse `ONT::X` as a type and anything else as a synset id or sense key.
    pub fn parse_node(&self, text: &str) -> Result<HybridNode> {
        let node = if text.starts_with(crate::model::ONT_PREFIX) {
            HybridNode::Type(TypeId::new(text)?)
        } else {
            HybridNode::Synset(text.to_string())
        };
        self.node(&node)
    }
}
