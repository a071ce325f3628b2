//! Fixture loaders shared by unit tests.

use std::path::PathBuf;

use crate::corpus::Corpus;
use crate::learner::RuleSet;
use crate::model::Resource;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn seed() -> Resource {
    crate::io::load_resource(&fixtures().join("seed")).expect("seed fixture loads")
}

pub fn rules(resource: &Resource) -> RuleSet {
    crate::io::load_rules(&fixtures().join("seed"), resource).expect("rule fixtures load")
}

pub fn corpus() -> Corpus {
    crate::io::load_corpus(&fixtures().join("corpus.json")).expect("corpus fixture loads")
}

#[test]
fn fixtures_load() {
    let r = seed();
    rules(&r);
    assert!(!corpus().is_empty());
}
