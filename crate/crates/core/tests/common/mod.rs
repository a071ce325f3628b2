#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use verblex::corpus::{Corpus, Synset};
use verblex::learner::RuleSet;
use verblex::mapping::{Mapping, MappingKind, MappingProvenance};
use verblex::model::{OntType, Resource, ResourceData, SenseKey, TypeId};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn seed_dir() -> PathBuf {
    fixtures().join("seed")
}

pub fn corpus_path() -> PathBuf {
    fixtures().join("corpus.json")
}

pub fn seed() -> Resource {
    verblex::io::load_resource(&seed_dir()).unwrap()
}

pub fn rules(r: &Resource) -> RuleSet {
    verblex::io::load_rules(&seed_dir(), r).unwrap()
}

pub fn corpus() -> Corpus {
    verblex::io::load_corpus(&corpus_path()).unwrap()
}

pub fn ty(name: &str) -> TypeId {
    TypeId::lenient(name).unwrap()
}

pub fn synset(id: &str, hypernyms: &[String]) -> Synset {
    Synset {
        id: id.to_string(),
        senses: vec![SenseKey::new(id).unwrap()],
        gloss: String::new(),
        tagged_gloss: Vec::new(),
        hypernyms: hypernyms.to_vec(),
        examples: Vec::new(),
    }
}

pub fn direct(synset: &str, t: &str) -> Mapping {
    Mapping {
        synset: synset.to_string(),
        ty: ty(t),
        kind: MappingKind::Direct,
        provenance: MappingProvenance::Seed,
    }
}

/// A resource with the given `(type, parent)` tree and mappings, reusing the
/// seed vocabulary; everything else is empty.
pub fn tree_resource(types: &[(String, Option<String>)], mappings: Vec<Mapping>) -> Resource {
    let base = seed();
    let mut ontology = BTreeMap::new();
    for (name, parent) in types {
        let t = OntType::new(ty(name), parent.as_deref().map(ty));
        ontology.insert(t.id.clone(), t);
    }
    Resource::new(ResourceData {
        vocabulary: base.vocabulary.clone(),
        ontology,
        lexicon: BTreeMap::new(),
        templates: BTreeMap::new(),
        axioms: BTreeMap::new(),
        mappings,
    })
    .unwrap()
}

pub fn synset_id(i: usize) -> String {
    format!("s{i}%2:30:00::")
}

/// Random type tree plus a random synset forest hung off it; roughly a
/// third of the synsets are mapped directly, the rest inherit through
/// hypernyms or stay unresolvable.
pub fn random_hierarchy(seed: u64, n_types: usize, n_synsets: usize) -> (Resource, Corpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let types: Vec<(String, Option<String>)> = (0..n_types)
        .map(|i| {
            let parent = (i > 0).then(|| format!("ONT::T{}", rng.gen_range(0..i)));
            (format!("ONT::T{i}"), parent)
        })
        .collect();
    let mut synsets = Vec::new();
    let mut mappings = Vec::new();
    for i in 0..n_synsets {
        let hyps: Vec<String> = if i > 0 && rng.gen_bool(0.8) {
            let mut h = vec![synset_id(rng.gen_range(0..i))];
            if i > 1 && rng.gen_bool(0.15) {
                h.push(synset_id(rng.gen_range(0..i)));
                h.dedup();
            }
            h
        } else {
            Vec::new()
        };
        let id = synset_id(i);
        if i == 0 || rng.gen_bool(0.33) {
            mappings.push(direct(&id, &format!("ONT::T{}", rng.gen_range(0..n_types))));
        }
        synsets.push(synset(&id, &hyps));
    }
    (tree_resource(&types, mappings), Corpus::new(synsets).unwrap())
}
