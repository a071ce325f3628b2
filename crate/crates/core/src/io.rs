//! Resource file sets: JSON load/save with a hashed manifest.
//!
//! A resource directory holds one JSON array or object per component:
//!
//! | file | content |
//! |------|---------|
//! | `vocabulary.json` | feature attributes, role inventory, role variants, event root |
//! | `ontology.json` | `[{name, parent, arguments, axioms, wn, provenance, ...}]` |
//! | `lexicon.json` | `[{word, pos, senses: [{type, templates}]}]` |
//! | `templates.json` | `[{name, slots: [{grel, constraint, role, coindex}]}]` |
//! | `axioms.json` | `[{id, antecedent, consequent, existentials}]`, expressions in term notation |
//! | `mappings.json` | `[{synset, type, kind, provenance}]` |
//! | `skeleton_rules.json` | `{core_roles, rules: [{id, pattern, emits, priority}]}` |
//! | `phrase_rules.json` | `[{head, modifiers, target}]` |
//! | `manifest.json` | `{format_version, files: {name: sha256}}` |
//!
//! Output is canonical: object keys sorted, two-space indentation, trailing newline.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::learner::{PhraseRule, RuleSet, SkeletonRules};
use crate::logic::Axiom;
use crate::mapping::Mapping;
use crate::model::{LexEntry, LinkingTemplate, OntType, Resource, ResourceData, Vocabulary};

pub const FORMAT_VERSION: u32 = 1;

pub const VOCABULARY: &str = "vocabulary.json";
pub const ONTOLOGY: &str = "ontology.json";
pub const LEXICON: &str = "lexicon.json";
pub const TEMPLATES: &str = "templates.json";
pub const AXIOMS: &str = "axioms.json";
pub const MAPPINGS: &str = "mappings.json";
pub const SKELETON_RULES: &str = "skeleton_rules.json";
pub const PHRASE_RULES: &str = "phrase_rules.json";
pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub files: BTreeMap<String, String>,
}

/// Canonical JSON text of any serializable value.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|source| Error::Json {
        path: PathBuf::from("<memory>"),
        source,
    })?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|source| Error::Json {
        path: PathBuf::from("<memory>"),
        source,
    })?;
    s.push('\n');
    Ok(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse(path, &read(path)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &canonical_json(value)?)
}

/// Checks the manifest, when one is present, against the files on disk.
pub fn verify_manifest(dir: &Path) -> Result<Option<Manifest>> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Ok(None);
    }
    let manifest: Manifest = read_json(&path)?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::invalid(
            MANIFEST,
            format!("format version {} not recognized (expected {FORMAT_VERSION})", manifest.format_version),
        )
        .in_file(path.display().to_string()));
    }
    for (name, hash) in &manifest.files {
        let file = dir.join(name);
        let bytes = fs::read(&file).map_err(|source| Error::Io { path: file.clone(), source })?;
        if &sha256_hex(&bytes) != hash {
            return Err(Error::invalid(format!("manifest entry {name}"), "content hash mismatch")
                .in_file(path.display().to_string()));
        }
    }
    Ok(Some(manifest))
}

fn keyed<K: Ord, V>(file: &Path, items: Vec<V>, key: impl Fn(&V) -> K, what: impl Fn(&K) -> String) -> Result<BTreeMap<K, V>> {
    let mut map = BTreeMap::new();
    for item in items {
        let k = key(&item);
        if map.contains_key(&k) {
            return Err(Error::invalid(what(&k), "record listed twice").in_file(file.display().to_string()));
        }
        map.insert(k, item);
    }
    Ok(map)
}

/// The file a validation error most likely comes from, judged by its record key.
fn file_of(err: &Error) -> &'static str {
    let key = match err {
        Error::Dangling { key, .. } | Error::UnknownRole { key, .. } | Error::UnknownFeature { key, .. } | Error::Invalid { key, .. } => {
            key.as_str()
        }
        Error::Cycle { .. } => return ONTOLOGY,
        Error::DuplicateMapping { .. } => return MAPPINGS,
        _ => "",
    };
    match key.split_whitespace().next() {
        Some("type" | "ontology") => ONTOLOGY,
        Some("lexicon") => LEXICON,
        Some("template") => TEMPLATES,
        Some("axiom") => AXIOMS,
        Some("mapping") => MAPPINGS,
        Some("vocabulary") => VOCABULARY,
        _ => "resource",
    }
}

pub fn load_resource(dir: &Path) -> Result<Resource> {
    verify_manifest(dir)?;
    let p = |name: &str| dir.join(name);
    let vocabulary: Vocabulary = read_json(&p(VOCABULARY))?;
    let ontology: Vec<OntType> = read_json(&p(ONTOLOGY))?;
    let lexicon: Vec<LexEntry> = read_json(&p(LEXICON))?;
    let templates: Vec<LinkingTemplate> = read_json(&p(TEMPLATES))?;
    let axioms: Vec<Axiom> = read_json(&p(AXIOMS))?;
    let mappings: Vec<Mapping> = read_json(&p(MAPPINGS))?;
    let data = ResourceData {
        vocabulary,
        ontology: keyed(&p(ONTOLOGY), ontology, |t| t.id.clone(), |k| format!("type {k}"))?,
        lexicon: keyed(&p(LEXICON), lexicon, LexEntry::key, |k| format!("lexicon {} ({})", k.word, k.pos))?,
        templates: keyed(&p(TEMPLATES), templates, |t| t.name.clone(), |k| format!("template {k}"))?,
        axioms: keyed(&p(AXIOMS), axioms, |a| a.id.clone(), |k| format!("axiom {k}"))?,
        mappings,
    };
    Resource::new(data).map_err(|e| {
        let file = file_of(&e);
        e.in_file(dir.join(file).display().to_string())
    })
}

pub fn load_rules(dir: &Path, resource: &Resource) -> Result<RuleSet> {
    let skeleton: SkeletonRules = read_json(&dir.join(SKELETON_RULES))?;
    let phrase: Vec<PhraseRule> = read_json(&dir.join(PHRASE_RULES))?;
    let rules = RuleSet { skeleton, phrase };
    rules.validate(resource)?;
    Ok(rules)
}

pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let text = read(path)?;
    let corpus: Corpus = parse(path, &text)?;
    Ok(corpus)
}

/// In-memory canonical texts of a resource, keyed by file name.
pub fn resource_texts(resource: &Resource) -> Result<BTreeMap<&'static str, String>> {
    let d = resource.data();
    let mut out = BTreeMap::new();
    out.insert(VOCABULARY, canonical_json(&d.vocabulary)?);
    out.insert(ONTOLOGY, canonical_json(&d.ontology.values().collect::<Vec<_>>())?);
    out.insert(LEXICON, canonical_json(&d.lexicon.values().collect::<Vec<_>>())?);
    out.insert(TEMPLATES, canonical_json(&d.templates.values().collect::<Vec<_>>())?);
    out.insert(AXIOMS, canonical_json(&d.axioms.values().collect::<Vec<_>>())?);
    let mut mappings = d.mappings.clone();
    mappings.sort_by(|a, b| (&a.synset, &a.ty).cmp(&(&b.synset, &b.ty)));
    out.insert(MAPPINGS, canonical_json(&mappings)?);
    Ok(out)
}

pub fn rules_texts(rules: &RuleSet) -> Result<BTreeMap<&'static str, String>> {
    let mut out = BTreeMap::new();
    out.insert(SKELETON_RULES, canonical_json(&rules.skeleton)?);
    out.insert(PHRASE_RULES, canonical_json(&rules.phrase)?);
    Ok(out)
}

/// Writes `files` into `dir` plus a manifest hashing them.
pub fn write_fileset(dir: &Path, files: &BTreeMap<&'static str, String>) -> Result<Manifest> {
    let mut manifest = Manifest {
        format_version: FORMAT_VERSION,
        files: BTreeMap::new(),
    };
    for (name, text) in files {
        write_text(&dir.join(name), text)?;
        manifest.files.insert((*name).to_string(), sha256_hex(text.as_bytes()));
    }
    write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

pub fn save_resource(resource: &Resource, dir: &Path) -> Result<Manifest> {
    write_fileset(dir, &resource_texts(resource)?)
}

/// Saves a resource together with its rule files, as a complete seed-style directory.
pub fn save_all(resource: &Resource, rules: &RuleSet, dir: &Path) -> Result<Manifest> {
    let mut files = resource_texts(resource)?;
    files.extend(rules_texts(rules)?);
    write_fileset(dir, &files)
}

/// Coverage counts in the style of a lexicon statistics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub verbs: usize,
    pub sense_types: usize,
    pub avg_senses_per_verb: f64,
    pub types: usize,
}

impl Summary {
    pub fn avg_display(&self) -> String {
        format!("{:.2}", self.avg_senses_per_verb)
    }
}

/// Distinct verb lemmas, event-type count, and mean senses per verb lemma.
pub fn summarize(resource: &Resource) -> Summary {
    let verbs: Vec<&LexEntry> = resource.lexicon.values().filter(|e| e.pos == crate::model::Pos::V).collect();
    let senses: usize = verbs.iter().map(|e| e.senses.len()).sum();
    let root = &resource.vocabulary.event_root;
    let sense_types = if resource.contains(root) {
        resource
            .ontology
            .keys()
            .filter(|t| resource.subsumes(root, t).unwrap_or(false))
            .count()
    } else {
        0
    };
    Summary {
        verbs: verbs.len(),
        sense_types,
        avg_senses_per_verb: if verbs.is_empty() { 0.0 } else { senses as f64 / verbs.len() as f64 },
        types: resource.ontology.len(),
    }
}
