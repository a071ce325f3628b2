mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use verblex::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_REJECTED};

fn verblex(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["verblex"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> String {
    path.display().to_string()
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&f).unwrap()))
        .collect()
}

fn build(out: &Path, jobs: &str) -> (i32, String, String) {
    verblex(&[
        "build",
        "--seed",
        &p(&common::seed_dir()),
        "--corpus",
        &p(&common::corpus_path()),
        "--out",
        &p(out),
        "--jobs",
        jobs,
    ])
}

#[test]
fn build_reports_the_rejected_synset_and_leaves_inputs_alone() {
    let before = dir_bytes(&common::seed_dir());
    let corpus_before = fs::read(common::corpus_path()).unwrap();
    let out = tempfile::tempdir().unwrap();
    let (code, stdout, _) = build(out.path(), "2");
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("rejected 1"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("build_report.json")).unwrap()).unwrap();
    let ask = report["synsets"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["synset"] == "ask%2:32:05::")
        .unwrap();
    assert_eq!(ask["status"], "rejected");
    assert_eq!(ask["reason"], "STATIVE-VS-EVENT");
    assert_eq!(dir_bytes(&common::seed_dir()), before);
    assert_eq!(fs::read(common::corpus_path()).unwrap(), corpus_before);
}

#[test]
fn build_output_does_not_depend_on_worker_count() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(build(a.path(), "1").0, EXIT_OK);
    assert_eq!(build(b.path(), "4").0, EXIT_OK);
    assert_eq!(dir_bytes(a.path()), dir_bytes(b.path()));
}

#[test]
fn build_refuses_to_write_over_the_seed() {
    let seed = p(&common::seed_dir());
    let (code, _, err) = verblex(&["build", "--seed", &seed, "--corpus", &p(&common::corpus_path()), "--out", &seed]);
    assert_eq!(code, EXIT_INPUT, "{err}");
}

#[test]
fn query_type_prints_the_derived_concept() {
    let out = tempfile::tempdir().unwrap();
    build(out.path(), "0");
    let (code, text, _) = verblex(&["query-type", "--seed", &p(out.path()), "ONT::PINION-WN23500"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("Parent: ONT::CONFINE"), "{text}");
    assert!(text.contains("AGENT {PHYS-OBJ ORIGIN=NATURAL}\nAFFECTED {PHYS-OBJ ORIGIN=NATURAL}\n"), "{text}");
    assert!(text.contains("shackle v TEMPL AGENT-AFFECTED-XP-TEMPL"), "{text}");
    let (code, _, _) = verblex(&["query-type", "--seed", &p(out.path()), "ONT::NO-SUCH-TYPE"]);
    assert_eq!(code, EXIT_REJECTED);
}

#[test]
fn entail_follows_the_kill_chain() {
    let facts = p(&common::fixtures().join("facts/kill.facts"));
    let seed = p(&common::seed_dir());
    let (code, text, _) = verblex(&["entail", "--seed", &seed, "--facts", &facts, "--query", "[ONT::DEAD b]@AFTER(t)"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("yes\n"), "{text}");
    assert!(text.contains("by die"), "{text}");
    let (_, text, _) = verblex(&["entail", "--seed", &seed, "--facts", &facts, "--query", "[ONT::DEAD a]"]);
    assert_eq!(text, "unknown\n");
    let (code, _, _) = verblex(&["entail", "--seed", &seed, "--facts", &facts, "--query", "[ONT::DEAD :colour b]"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn parse_gloss_dumps_terms_or_rejects() {
    let seed = p(&common::seed_dir());
    let (code, text, _) = verblex(&["parse-gloss", "--seed", &seed, "cause to die"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("(IMPRO X1 ONT::REFERENTIAL-SEM)"), "{text}");
    let (code, _, err) = verblex(&["parse-gloss", "--seed", &seed, "stir feelings in"]);
    assert_eq!(code, EXIT_REJECTED);
    assert!(err.contains("unknown token"), "{err}");
    let corpus = p(&common::corpus_path());
    let (code, text, _) = verblex(&["parse-gloss", "--seed", &seed, "--corpus", &corpus, "--synset", "kill%2:35:00::", "--limit", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("# 1 of"), "{text}");
}

#[test]
fn eval_commands() {
    let seed = p(&common::seed_dir());
    let corpus = p(&common::corpus_path());
    let eval = common::fixtures().join("eval");
    let roles = p(&eval.join("role_cases.json"));
    let (code, text, _) = verblex(&["eval-roles", "--seed", &seed, "--corpus", &corpus, "--cases", &roles]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("baseline micro"), "{text}");
    // kill has no lexicon verb under its type, so it is not a valid template case.
    let (code, _, err) = verblex(&["eval-templates", "--seed", &seed, "--corpus", &corpus, "--cases", &roles]);
    assert_eq!(code, EXIT_REJECTED, "{err}");
    let templates = p(&eval.join("template_cases.json"));
    assert_eq!(verblex(&["eval-templates", "--seed", &seed, "--corpus", &corpus, "--cases", &templates]).0, EXIT_OK);
    let j = p(&eval.join("judgements.tsv"));
    let (code, text, _) = verblex(&["eval-sim", "--seed", &seed, "--corpus", &corpus, "--judgements", &j]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("unresolved 1"), "{text}");
}

#[test]
fn bad_inputs_exit_with_two() {
    assert_eq!(verblex(&["validate", "--seed", "/definitely/not/here"]).0, EXIT_INPUT);
    assert_eq!(verblex(&["build", "--seed", "x"]).0, EXIT_INPUT);
    assert_eq!(verblex(&["no-such-command"]).0, EXIT_INPUT);
    let bad = tempfile::tempdir().unwrap();
    for f in fs::read_dir(common::seed_dir()).unwrap() {
        let f = f.unwrap().path();
        fs::copy(&f, bad.path().join(f.file_name().unwrap())).unwrap();
    }
    fs::write(bad.path().join("lexicon.json"), "[{\"word\": ").unwrap();
    let (code, _, err) = verblex(&["validate", "--seed", &p(bad.path())]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("lexicon.json"), "{err}");
    assert_eq!(verblex(&["--help"]).0, EXIT_OK);
}

#[test]
fn repeated_runs_print_identical_output() {
    let seed = p(&common::seed_dir());
    let corpus = p(&common::corpus_path());
    for args in [
        vec!["summarize", "--seed", &seed],
        vec!["validate", "--seed", &seed, "--corpus", &corpus],
        vec!["similarity", "--seed", &seed, "--corpus", &corpus, "eat", "drink"],
    ] {
        let a = verblex(&args);
        assert_eq!(a.0, EXIT_OK, "{args:?}: {}", a.2);
        assert_eq!(a, verblex(&args));
    }
}
