//! C ABI for loading, building and querying verblex resources.
//!
//! Every fallible call returns a [`VerblexStatus`]; on failure the message is
//! available from [`verblex_last_error`] on the same thread. Strings handed
//! out through `char **` parameters are owned by the caller and must be
//! released with [`verblex_string_free`]. Handles are freed with their
//! matching `*_free` function; passing NULL to any `*_free` is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use verblex::corpus::{tokenize_text, Corpus};
use verblex::defparser::{parse_definition, LexIndex, ParseContext};
use verblex::inference::{entails, parse_fact, resource_closure, Entailment, Time};
use verblex::learner::{bootstrap, BootstrapOptions, RuleSet};
use verblex::mapping::Hybrid;
use verblex::model::{Resource, TypeId};
use verblex::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerblexStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// A file could not be read or written.
    Io = 3,
    /// Malformed or inconsistent resource, corpus or fact text.
    Schema = 4,
    /// The named type, word or synset is not in the resource.
    NotFound = 5,
    /// Well-formed input the pipeline declined (no parse, for example).
    Rejected = 6,
    Panic = 7,
}

/// A loaded resource, with its rule files when the directory has them.
pub struct VerblexResource {
    resource: Resource,
    rules: Option<RuleSet>,
}

/// A loaded gloss corpus.
pub struct VerblexCorpus {
    corpus: Corpus,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(VerblexStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.root() {
            Error::Io { .. } => VerblexStatus::Io,
            Error::UnknownType(_) | Error::UnknownSynset(_) | Error::UnknownTemplate(_) => VerblexStatus::NotFound,
            _ => VerblexStatus::Schema,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: VerblexStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Runs `f`, converting errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VerblexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            VerblexStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VerblexStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(VerblexStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(VerblexStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(VerblexStatus::NullArgument, format!("{what} is NULL")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(fail(VerblexStatus::NullArgument, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

fn owned(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| fail(VerblexStatus::Schema, "output contains a NUL byte"))
}

fn json<T: serde::Serialize>(v: &T) -> Result<*mut c_char, Failure> {
    owned(verblex::io::canonical_json(v)?)
}

/// Message for the last call on this thread, or NULL if it succeeded. Valid
/// until the next verblex call on the same thread.
#[no_mangle]
pub extern "C" fn verblex_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn verblex_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn verblex_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a resource directory; rule files are picked up when present.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn verblex_resource_load(dir: *const c_char, out: *mut *mut VerblexResource) -> VerblexStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let dir = Path::new(text(dir, "dir")?);
        let resource = verblex::io::load_resource(dir)?;
        let rules = if dir.join("skeleton_rules.json").exists() {
            Some(verblex::io::load_rules(dir, &resource)?)
        } else {
            None
        };
        *out = Box::into_raw(Box::new(VerblexResource { resource, rules }));
        Ok(())
    })
}

/// # Safety
/// `r` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn verblex_resource_free(r: *mut VerblexResource) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Write the resource (and its rules, if loaded with them) to `dir`.
///
/// # Safety
/// `r` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn verblex_resource_save(r: *const VerblexResource, dir: *const c_char) -> VerblexStatus {
    guard(|| {
        let r = handle(r, "resource")?;
        let dir = Path::new(text(dir, "dir")?);
        match &r.rules {
            Some(rules) => verblex::io::save_all(&r.resource, rules, dir)?,
            None => verblex::io::save_resource(&r.resource, dir)?,
        };
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn verblex_corpus_load(path: *const c_char, out: *mut *mut VerblexCorpus) -> VerblexStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let corpus = verblex::io::load_corpus(Path::new(text(path, "path")?))?;
        *out = Box::into_raw(Box::new(VerblexCorpus { corpus }));
        Ok(())
    })
}

/// # Safety
/// `c` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn verblex_corpus_free(c: *mut VerblexCorpus) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Run the bootstrap loop. The seed handle is left untouched; the new
/// resource goes to `out` and the build report, as JSON, to `report_json`
/// (which may be NULL). `jobs` = 0 uses every core.
///
/// # Safety
/// Handles must be live; `out` must be writable; `report_json` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn verblex_build(
    seed: *const VerblexResource,
    corpus: *const VerblexCorpus,
    max_iterations: u32,
    jobs: usize,
    out: *mut *mut VerblexResource,
    report_json: *mut *mut c_char,
) -> VerblexStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let seed = handle(seed, "seed")?;
        let corpus = handle(corpus, "corpus")?;
        if max_iterations == 0 {
            return Err(fail(VerblexStatus::Schema, "max_iterations must be at least 1"));
        }
        let rules = seed
            .rules
            .as_ref()
            .ok_or_else(|| fail(VerblexStatus::Schema, "seed was loaded without rule files"))?;
        let options = BootstrapOptions { max_iterations, jobs };
        let (built, report) = bootstrap(&corpus.corpus, seed.resource.clone(), rules, options)?;
        if !report_json.is_null() {
            *report_json = json(&report)?;
        }
        *out = Box::into_raw(Box::new(VerblexResource {
            resource: built,
            rules: Some(rules.clone()),
        }));
        Ok(())
    })
}

#[derive(serde::Serialize)]
struct TypeView<'a> {
    name: &'a TypeId,
    parent: Option<&'a TypeId>,
    roles: Vec<verblex::model::RoleSpec>,
    axioms: Vec<String>,
    synsets: Vec<String>,
}

/// A type's parent, effective roles, axioms (as text) and synsets, as JSON.
///
/// # Safety
/// `r` must be live, `name` NUL-terminated, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn verblex_query_type(
    r: *const VerblexResource,
    name: *const c_char,
    out_json: *mut *mut c_char,
) -> VerblexStatus {
    guard(|| {
        out_ptr(out_json, "out_json")?;
        let r = &handle(r, "resource")?.resource;
        let ty = TypeId::lenient(text(name, "name")?)?;
        let t = r.get(&ty)?;
        let view = TypeView {
            name: &t.id,
            parent: t.parent.as_ref(),
            roles: r.effective_roles(&ty)?,
            axioms: t
                .axioms
                .iter()
                .filter_map(|id| r.axioms.get(id))
                .map(|a| format!("{} => {}", a.antecedent, a.consequent))
                .collect(),
            synsets: t.synsets.iter().map(ToString::to_string).collect(),
        };
        *out_json = json(&view)?;
        Ok(())
    })
}

/// Best WuP similarity over the senses of two words.
///
/// # Safety
/// Handles must be live, words NUL-terminated, `score` writable.
#[no_mangle]
pub unsafe extern "C" fn verblex_word_similarity(
    r: *const VerblexResource,
    corpus: *const VerblexCorpus,
    word1: *const c_char,
    word2: *const c_char,
    score: *mut f64,
) -> VerblexStatus {
    guard(|| {
        out_ptr(score, "score")?;
        let r = handle(r, "resource")?;
        let c = handle(corpus, "corpus")?;
        let (a, b) = (text(word1, "word1")?, text(word2, "word2")?);
        let h = Hybrid::new(&r.resource, &c.corpus);
        for w in [a, b] {
            if h.sense_nodes(w).is_empty() {
                return Err(fail(VerblexStatus::NotFound, format!("word {w} has no senses")));
            }
        }
        *score = h.word_similarity(a, b)?.score;
        Ok(())
    })
}

/// Forward-chain the facts (one per line) and test the query.
/// `answer` is set to 1 for yes and 0 for unknown; `trace_json` (may be NULL)
/// receives the derivation as a JSON list.
///
/// # Safety
/// `r` must be live, strings NUL-terminated, out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn verblex_entails(
    r: *const VerblexResource,
    facts: *const c_char,
    query: *const c_char,
    max_depth: usize,
    answer: *mut i32,
    trace_json: *mut *mut c_char,
) -> VerblexStatus {
    guard(|| {
        out_ptr(answer, "answer")?;
        let r = &handle(r, "resource")?.resource;
        let mut fs = Vec::new();
        for (i, line) in text(facts, "facts")?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (f, _) = parse_fact(r, line, None).map_err(|e| fail(VerblexStatus::Schema, format!("fact {}: {e}", i + 1)))?;
            fs.push(f);
        }
        let (q, timed) = parse_fact(r, text(query, "query")?, Some(Time::at("?")))?;
        let closure = resource_closure(r, &fs, max_depth)?;
        let result = entails(r, &closure, &q, timed)?;
        *answer = matches!(result, Entailment::Yes(_)) as i32;
        if !trace_json.is_null() {
            let trace = match &result {
                Entailment::Yes(t) => t.clone(),
                Entailment::Unknown => Vec::new(),
            };
            *trace_json = json(&trace)?;
        }
        Ok(())
    })
}

/// Term dump of the best analysis of a definition.
///
/// # Safety
/// `r` must be live, `gloss` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn verblex_parse_gloss(
    r: *const VerblexResource,
    gloss: *const c_char,
    out: *mut *mut c_char,
) -> VerblexStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let r = &handle(r, "resource")?.resource;
        let tokens = tokenize_text(text(gloss, "gloss")?);
        let graphs = parse_definition(&LexIndex::new(r), &tokens, &ParseContext::default())
            .map_err(|e| fail(VerblexStatus::Rejected, e.to_string()))?;
        *out = owned(graphs[0].term_dump())?;
        Ok(())
    })
}

/// Spearman's rank correlation of two arrays of length `n`.
///
/// # Safety
/// `xs` and `ys` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn verblex_spearman(xs: *const f64, ys: *const f64, n: usize, out: *mut f64) -> VerblexStatus {
    guard(|| {
        out_ptr(out, "out")?;
        if xs.is_null() || ys.is_null() {
            return Err(fail(VerblexStatus::NullArgument, "input array is NULL"));
        }
        let (a, b) = (std::slice::from_raw_parts(xs, n), std::slice::from_raw_parts(ys, n));
        *out = verblex::eval::spearman(a, b).map_err(|e| fail(VerblexStatus::Rejected, e.to_string()))?;
        Ok(())
    })
}
