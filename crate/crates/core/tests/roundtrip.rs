mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use verblex::io::{load_resource, load_rules, save_all, save_resource};
use verblex::learner::{bootstrap, BootstrapOptions};

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn seed_survives_save_and_load() {
    let r = common::seed();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    save_resource(&r, a.path()).unwrap();
    save_resource(&r, b.path()).unwrap();
    assert_eq!(load_resource(a.path()).unwrap(), r);
    assert_eq!(dir_bytes(a.path()), dir_bytes(b.path()));
}

#[test]
fn built_resource_survives_save_and_load() {
    let seed = common::seed();
    let rules = common::rules(&seed);
    let (built, _) = bootstrap(&common::corpus(), seed, &rules, BootstrapOptions::default()).unwrap();
    let a = tempfile::tempdir().unwrap();
    save_all(&built, &rules, a.path()).unwrap();
    let back = load_resource(a.path()).unwrap();
    assert_eq!(back, built);
    assert_eq!(load_rules(a.path(), &back).unwrap(), rules);
    let b = tempfile::tempdir().unwrap();
    save_all(&back, &rules, b.path()).unwrap();
    assert_eq!(dir_bytes(a.path()), dir_bytes(b.path()));
}

#[test]
fn tampered_files_fail_the_manifest_check() {
    let a = tempfile::tempdir().unwrap();
    save_resource(&common::seed(), a.path()).unwrap();
    let lex = a.path().join("lexicon.json");
    let text = fs::read_to_string(&lex).unwrap();
    fs::write(&lex, text.replacen("shackle", "shackles", 1)).unwrap();
    let err = load_resource(a.path()).unwrap_err();
    assert!(err.to_string().contains("hash"), "{err}");
}
