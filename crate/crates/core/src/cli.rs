//! The `verblex` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{tokenize_text, Corpus};
use crate::defparser::{parse_definition, LexIndex, ParseContext};
use crate::error::Error;
use crate::eval::{self, AblationCase};
use crate::inference::{entails, parse_fact, resource_closure, Entailment, GroundFact};
use crate::io;
use crate::learner::{bootstrap, BootstrapOptions, RuleSet};
use crate::mapping::Hybrid;
use crate::model::{Preference, Resource, TypeId};

#[derive(Debug, Parser)]
#[command(name = "verblex", version, about = "Build and query a verb lexicon learned from glosses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Resource directory (a seed or a built resource).
    #[arg(long, value_name = "DIR")]
    pub seed: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Gloss corpus (JSON).
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn new types and lexical entries from the corpus.
    Build {
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        max_iterations: u32,
        /// Worker threads; 0 uses every core.
        #[arg(long, value_name = "N", default_value_t = 0)]
        jobs: usize,
        /// Where to write the build report (default: OUT/build_report.json).
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Show a type's parent, roles, axioms and synsets.
    QueryType {
        #[command(flatten)]
        seed: SeedArgs,
        name: String,
    },
    /// Best WuP similarity between two words and the witnessing senses.
    Similarity {
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        corpus: CorpusArgs,
        word1: String,
        word2: String,
    },
    /// Does a set of timed facts entail the query?
    Entail {
        #[command(flatten)]
        seed: SeedArgs,
        /// One fact per line, e.g. `[ONT::KILL :agent a :affected b]@AT(t)`.
        #[arg(long, value_name = "FILE")]
        facts: PathBuf,
        /// A fact; without a time it matches at any time.
        #[arg(long)]
        query: String,
        #[arg(long, value_name = "N", default_value_t = 8)]
        max_depth: usize,
    },
    /// Print the ranked logical forms of a definition.
    ParseGloss {
        #[command(flatten)]
        seed: SeedArgs,
        /// Definition text; omit when --synset is given.
        gloss: Option<String>,
        /// Parse this synset's (tagged) gloss instead.
        #[arg(long, requires = "corpus")]
        synset: Option<String>,
        #[arg(long, value_name = "FILE")]
        corpus: Option<PathBuf>,
        /// Show only the best N analyses.
        #[arg(long, value_name = "N")]
        limit: Option<usize>,
    },
    /// Role-set ablation against gold cases.
    EvalRoles {
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "FILE")]
        cases: PathBuf,
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Template ablation against gold cases.
    EvalTemplates {
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "FILE")]
        cases: PathBuf,
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Spearman correlation against human similarity judgements.
    EvalSim {
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Tab-separated word1, word2, score.
        #[arg(long, value_name = "FILE")]
        judgements: PathBuf,
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Lexicon and ontology counts.
    Summarize {
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Load and check a resource (and optionally a corpus) without writing anything.
    Validate {
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, value_name = "FILE")]
        corpus: Option<PathBuf>,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Why a command failed; decides the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Inputs were fine but the request was refused (no parse, invalid case, unknown word).
    Rejected(String),
    /// Unreadable, malformed or inconsistent input.
    Input(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Rejected(_) => EXIT_REJECTED,
            Failure::Input(_) => EXIT_INPUT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Rejected(m) | Failure::Input(m) => m,
        }
    }
}

fn input(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

fn rejected(e: Error) -> Failure {
    Failure::Rejected(e.to_string())
}

type Outcome = std::result::Result<String, Failure>;

fn load_seed(args: &SeedArgs) -> Result<Resource, Failure> {
    require_dir(&args.seed, "resource")?;
    io::load_resource(&args.seed).map_err(input)
}

fn load_rules(args: &SeedArgs, resource: &Resource) -> Result<RuleSet, Failure> {
    io::load_rules(&args.seed, resource).map_err(input)
}

fn load_corpus(path: &Path) -> Result<Corpus, Failure> {
    io::load_corpus(path).map_err(input)
}

fn require_file(path: &Path, what: &str) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Input(format!("{}: {what} file not found", path.display())))
    }
}

fn require_dir(path: &Path, what: &str) -> Result<(), Failure> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(Failure::Input(format!("{}: {what} directory not found", path.display())))
    }
}

/// Absolute form of a path that may not exist yet.
fn absolute(path: &Path) -> PathBuf {
    if let Ok(p) = path.canonicalize() {
        return p;
    }
    match (path.parent(), path.file_name()) {
        (Some(parent), Some(name)) if !parent.as_os_str().is_empty() => absolute(parent).join(name),
        _ => std::env::current_dir().map(|d| d.join(path)).unwrap_or_else(|_| path.to_path_buf()),
    }
}

fn write_report<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    io::write_json(path, value).map_err(input)
}

fn format_preference(resource: &Resource, pref: &Preference) -> String {
    match pref {
        Preference::Type(t) => t.to_string(),
        Preference::Features(f) => resource.vocabulary.format_features(f),
    }
}

fn query_type(resource: &Resource, name: &str) -> Outcome {
    let ty = TypeId::lenient(name).map_err(rejected)?;
    let t = resource.get(&ty).map_err(rejected)?;
    let mut out = format!("{}\n\n", t.id);
    let _ = writeln!(
        out,
        "Parent: {}",
        t.parent.as_ref().map_or("(root)".to_string(), ToString::to_string)
    );
    out.push_str("\nArguments:\n");
    for spec in resource.effective_roles(&ty).map_err(rejected)? {
        let pref = format_preference(resource, &spec.preference);
        let opt = if spec.optional { " (optional)" } else { "" };
        let _ = writeln!(out, "{} {pref}{opt}", spec.role);
    }
    for id in &t.axioms {
        out.push_str("\nDefinition:\n");
        match resource.axioms.get(id) {
            Some(ax) => {
                let _ = writeln!(out, "{}", ax.consequent);
            }
            None => {
                let _ = writeln!(out, "(missing axiom {id})");
            }
        }
    }
    if !t.synsets.is_empty() {
        out.push_str("\nSynsets:\n");
        for k in &t.synsets {
            let _ = writeln!(out, "{k}");
        }
    }
    let entries: Vec<String> = resource
        .lexicon
        .values()
        .flat_map(|e| e.senses.iter().filter(|s| s.ty == ty).map(move |s| (e, s)))
        .map(|(e, s)| format!("{} {} TEMPL {}", e.word, e.pos, s.templates.join(" ")))
        .collect();
    if !entries.is_empty() {
        out.push_str("\nLexical entries:\n");
        for e in entries {
            let _ = writeln!(out, "{e}");
        }
    }
    Ok(out)
}

fn entail(resource: &Resource, facts_path: &Path, query: &str, max_depth: usize) -> Outcome {
    let text = std::fs::read_to_string(facts_path).map_err(|source| {
        input(Error::Io {
            path: facts_path.to_path_buf(),
            source,
        })
    })?;
    let mut facts: Vec<GroundFact> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (fact, _) = parse_fact(resource, line, None)
            .map_err(|e| Failure::Input(format!("{}:{}: {e}", facts_path.display(), i + 1)))?;
        facts.push(fact);
    }
    let (q, timed) = parse_fact(resource, query, Some(crate::inference::Time::at("?")))
        .map_err(|e| Failure::Input(format!("query: {e}")))?;
    let closure = resource_closure(resource, &facts, max_depth).map_err(rejected)?;
    let mut out = String::new();
    match entails(resource, &closure, &q, timed).map_err(rejected)? {
        Entailment::Yes(trace) => {
            out.push_str("yes\n");
            for step in trace {
                match step.axiom {
                    Some(a) => {
                        let _ = writeln!(out, "  {}  by {a}", step.fact);
                    }
                    None => {
                        let _ = writeln!(out, "  {}", step.fact);
                    }
                }
            }
        }
        Entailment::Unknown => {
            out.push_str("unknown\n");
            if closure.depth_exhausted {
                let _ = writeln!(out, "  (depth limit {max_depth} reached)");
            }
        }
    }
    Ok(out)
}

fn parse_gloss(resource: &Resource, gloss: Option<&str>, synset: Option<(&Corpus, &str)>, limit: Option<usize>) -> Outcome {
    let tokens = match (synset, gloss) {
        (Some((corpus, id)), _) => {
            let s = corpus.get(id).map_err(rejected)?;
            s.definitions().into_iter().next().unwrap_or_default()
        }
        (None, Some(text)) => tokenize_text(text),
        (None, None) => return Err(Failure::Input("give a gloss or --synset".into())),
    };
    let graphs = parse_definition(&LexIndex::new(resource), &tokens, &ParseContext::default())
        .map_err(|e| Failure::Rejected(e.to_string()))?;
    let n = limit.unwrap_or(graphs.len()).min(graphs.len());
    let mut out = String::new();
    for (i, g) in graphs.iter().take(n).enumerate() {
        let _ = writeln!(out, "# {} of {}", i + 1, graphs.len());
        out.push_str(&g.term_dump());
        if !out.ends_with('\n') {
            out.push('\n');
        }
    }
    Ok(out)
}

fn load_cases(path: &Path) -> Result<Vec<AblationCase>, Failure> {
    require_file(path, "cases")?;
    eval::load_cases(path).map_err(input)
}

fn ablation(seed: &SeedArgs, corpus: &CorpusArgs, cases: &Path, report: Option<&Path>, templates: bool) -> Outcome {
    let cases = load_cases(cases)?;
    let resource = load_seed(seed)?;
    let rules = load_rules(seed, &resource)?;
    let corpus = load_corpus(&corpus.corpus)?;
    let rep = if templates {
        for c in &cases {
            eval::check_template_case(&resource, &corpus, c).map_err(rejected)?;
        }
        eval::ablate_templates(&resource, &corpus, &rules, &cases)
    } else {
        eval::ablate_roles(&resource, &corpus, &rules, &cases)
    }
    .map_err(rejected)?;
    if let Some(p) = report {
        write_report(p, &rep)?;
    }
    Ok(rep.render(if templates { "templates" } else { "roles" }))
}

fn execute(cmd: Command) -> Outcome {
    match cmd {
        Command::Build {
            seed,
            corpus,
            out,
            max_iterations,
            jobs,
            report,
        } => {
            require_dir(&seed.seed, "seed")?;
            require_file(&corpus.corpus, "corpus")?;
            let out_abs = absolute(&out);
            if out_abs == absolute(&seed.seed) {
                return Err(Failure::Input("--out must differ from --seed".into()));
            }
            if absolute(&corpus.corpus).starts_with(&out_abs) {
                return Err(Failure::Input("--out must not contain the corpus".into()));
            }
            let resource = load_seed(&seed)?;
            let rules = load_rules(&seed, &resource)?;
            let corpus = load_corpus(&corpus.corpus)?;
            let options = BootstrapOptions {
                max_iterations,
                jobs,
            };
            let (built, rep) = bootstrap(&corpus, resource, &rules, options).map_err(rejected)?;
            io::save_all(&built, &rules, &out).map_err(input)?;
            let report_path = report.unwrap_or_else(|| out.join("build_report.json"));
            write_report(&report_path, &rep)?;
            Ok(rep.summary())
        }
        Command::QueryType { seed, name } => query_type(&load_seed(&seed)?, &name),
        Command::Similarity {
            seed,
            corpus,
            word1,
            word2,
        } => {
            let resource = load_seed(&seed)?;
            let corpus = load_corpus(&corpus.corpus)?;
            let sim = Hybrid::new(&resource, &corpus)
                .word_similarity(&word1.to_lowercase(), &word2.to_lowercase())
                .map_err(rejected)?;
            Ok(format!("{:.4}\n  {} ~ {}  via {}\n", sim.score, sim.a, sim.b, sim.lcs))
        }
        Command::Entail {
            seed,
            facts,
            query,
            max_depth,
        } => {
            require_file(&facts, "facts")?;
            entail(&load_seed(&seed)?, &facts, &query, max_depth)
        }
        Command::ParseGloss {
            seed,
            gloss,
            synset,
            corpus,
            limit,
        } => {
            if gloss.is_none() && synset.is_none() {
                return Err(Failure::Input("give a gloss or --synset".into()));
            }
            let resource = load_seed(&seed)?;
            let corpus = corpus.as_deref().map(load_corpus).transpose()?;
            let src = match (&corpus, &synset) {
                (Some(c), Some(s)) => Some((c, s.as_str())),
                _ => None,
            };
            parse_gloss(&resource, gloss.as_deref(), src, limit)
        }
        Command::EvalRoles {
            seed,
            corpus,
            cases,
            report,
        } => ablation(&seed, &corpus, &cases, report.as_deref(), false),
        Command::EvalTemplates {
            seed,
            corpus,
            cases,
            report,
        } => ablation(&seed, &corpus, &cases, report.as_deref(), true),
        Command::EvalSim {
            seed,
            corpus,
            judgements,
            report,
        } => {
            require_file(&judgements, "judgements")?;
            let resource = load_seed(&seed)?;
            let corpus = load_corpus(&corpus.corpus)?;
            let js = eval::load_judgements(&judgements).map_err(input)?;
            let rep = eval::sim_eval(&resource, &corpus, &js).map_err(rejected)?;
            if let Some(p) = report {
                write_report(&p, &rep)?;
            }
            let mut out = format!("spearman {:.4} over {} pairs\n", rep.rho, rep.scored.len());
            if !rep.unresolved.is_empty() {
                let _ = writeln!(out, "unresolved {}", rep.unresolved.len());
                for (a, b) in &rep.unresolved {
                    let _ = writeln!(out, "  {a}\t{b}");
                }
            }
            Ok(out)
        }
        Command::Summarize { seed } => {
            let s = io::summarize(&load_seed(&seed)?);
            Ok(format!(
                "verbs {}\nevent types {}\nsenses per verb {}\ntypes {}\n",
                s.verbs,
                s.sense_types,
                s.avg_display(),
                s.types
            ))
        }
        Command::Validate { seed, corpus } => {
            let resource = load_seed(&seed)?;
            load_rules(&seed, &resource)?;
            let mut out = format!(
                "{}: ok ({} types, {} lexical entries, {} axioms)\n",
                seed.seed.display(),
                resource.ontology.len(),
                resource.lexicon.len(),
                resource.axioms.len()
            );
            if let Some(c) = corpus {
                let corpus = load_corpus(&c)?;
                let _ = writeln!(out, "{}: ok ({} synsets)", c.display(), corpus.len());
            }
            Ok(out)
        }
    }
}

/// Parse `argv`, run the command, and return the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            let _ = write!(stdout, "{text}");
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}
