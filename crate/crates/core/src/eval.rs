//! Rank correlation, set precision/recall and the ablation drivers.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::learner::{Candidate, Learner, RuleSet};
use crate::mapping::Hybrid;
use crate::model::{Pos, Resource, SemRole, TypeId};

/// Ranks starting at 1; tied values share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of the tie-averaged ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("spearman", format!("length mismatch {} vs {}", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("spearman", "need at least two observations"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("spearman", "non-finite value"));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
        .ok_or_else(|| Error::invalid("spearman", "constant input, correlation undefined"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn from_counts(correct: usize, predicted: usize, gold: usize) -> Prf {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Prf::from_pr(ratio(correct, predicted), ratio(correct, gold))
    }

    fn from_pr(precision: f64, recall: f64) -> Prf {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf { precision, recall, f1 }
    }
}

impl fmt::Display for Prf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P={:.3} R={:.3} F1={:.3}", self.precision, self.recall, self.f1)
    }
}

/// Set precision and recall. An empty prediction scores zero throughout.
pub fn prf<T: Ord>(predicted: &BTreeSet<T>, gold: &BTreeSet<T>) -> Prf {
    let correct = predicted.intersection(gold).count();
    Prf::from_counts(correct, predicted.len(), gold.len())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimJudgement {
    pub word1: String,
    pub word2: String,
    pub human_score: f64,
}

/// Tab-separated `word1 word2 score [...]`. Blank lines and `#` comments are
/// skipped, as is a first line whose score column is not a number.
pub fn parse_judgements(text: &str) -> Result<Vec<SimJudgement>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let key = format!("line {}", i + 1);
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 {
            return Err(Error::invalid(key, "expected word1<TAB>word2<TAB>score"));
        }
        let score = match cols[2].trim().parse::<f64>() {
            Ok(s) if s.is_finite() => s,
            Ok(_) => return Err(Error::invalid(key, "score is not finite")),
            Err(_) if out.is_empty() && i == 0 => continue,
            Err(_) => return Err(Error::invalid(key, format!("bad score {:?}", cols[2]))),
        };
        out.push(SimJudgement {
            word1: cols[0].trim().to_lowercase(),
            word2: cols[1].trim().to_lowercase(),
            human_score: score,
        });
    }
    Ok(out)
}

pub fn load_judgements(path: &Path) -> Result<Vec<SimJudgement>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_judgements(&text).map_err(|e| e.in_file(path.display().to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoredPair {
    pub word1: String,
    pub word2: String,
    pub human: f64,
    pub system: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub rho: f64,
    pub scored: Vec<ScoredPair>,
    /// Pairs with a word that has no sense in the resource or corpus.
    pub unresolved: Vec<(String, String)>,
}

/// Spearman's rho between hybrid word similarity and the human scores.
pub fn sim_eval(resource: &Resource, corpus: &Corpus, judgements: &[SimJudgement]) -> Result<SimReport> {
    let hybrid = Hybrid::new(resource, corpus);
    let mut scored = Vec::new();
    let mut unresolved = Vec::new();
    for j in judgements {
        if hybrid.sense_nodes(&j.word1).is_empty() || hybrid.sense_nodes(&j.word2).is_empty() {
            unresolved.push((j.word1.clone(), j.word2.clone()));
            continue;
        }
        let sim = hybrid.word_similarity(&j.word1, &j.word2)?;
        scored.push(ScoredPair {
            word1: j.word1.clone(),
            word2: j.word2.clone(),
            human: j.human_score,
            system: sim.score,
        });
    }
    let xs: Vec<f64> = scored.iter().map(|p| p.system).collect();
    let ys: Vec<f64> = scored.iter().map(|p| p.human).collect();
    Ok(SimReport {
        rho: spearman(&xs, &ys)?,
        scored,
        unresolved,
    })
}

/// A curated synset whose entries are deleted and then re-derived.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationCase {
    pub synset: String,
    pub gold_roles: BTreeSet<SemRole>,
    pub gold_templates: BTreeSet<String>,
}

fn case_key(c: &AblationCase) -> String {
    format!("case {}", c.synset)
}

/// Checks shared by both drivers: known synset, direct mapping, non-empty gold.
fn check_case(resource: &Resource, corpus: &Corpus, c: &AblationCase) -> Result<TypeId> {
    let key = case_key(c);
    corpus.get(&c.synset)?;
    if c.gold_roles.is_empty() || c.gold_templates.is_empty() {
        return Err(Error::invalid(key, "gold sets must be non-empty"));
    }
    for t in &c.gold_templates {
        if !resource.templates.contains_key(t) {
            return Err(Error::UnknownTemplate(t.clone()).in_file(key));
        }
    }
    Hybrid::new(resource, corpus)
        .direct_type(&c.synset)
        .cloned()
        .ok_or_else(|| Error::invalid(key, "synset has no direct mapping"))
}

fn verb_lemmas(corpus: &Corpus, synset: &str) -> Result<BTreeSet<String>> {
    Ok(corpus.get(synset)?.lemmas().map(|l| l.replace('_', " ")).collect())
}

/// Template cases also need a lexicon verb of the synset under its mapped type.
pub fn check_template_case(resource: &Resource, corpus: &Corpus, c: &AblationCase) -> Result<()> {
    let ty = check_case(resource, corpus, c)?;
    let lemmas = verb_lemmas(corpus, &c.synset)?;
    let shared = resource
        .lexicon
        .values()
        .filter(|e| e.pos == Pos::V && lemmas.contains(&e.word))
        .any(|e| e.senses.iter().any(|s| s.ty == ty));
    if shared {
        Ok(())
    } else {
        Err(Error::invalid(
            case_key(c),
            format!("no lexicon item shared between the synset and {ty}"),
        ))
    }
}

pub fn load_cases(path: &Path) -> Result<Vec<AblationCase>> {
    crate::io::read_json(path)
}

/// The resource with the case's curated entries removed: its sense keys from
/// every type's synset list and its lemmas' verb senses of the mapped type.
pub fn ablate(resource: &Resource, corpus: &Corpus, synset: &str, ty: &TypeId) -> Result<Resource> {
    let s = corpus.get(synset)?;
    let lemmas = verb_lemmas(corpus, synset)?;
    let mut data = resource.data().clone();
    for t in data.ontology.values_mut() {
        t.synsets.retain(|k| !s.senses.contains(k));
    }
    for e in data.lexicon.values_mut() {
        if e.pos == Pos::V && lemmas.contains(&e.word) {
            e.senses.retain(|x| &x.ty != ty);
        }
    }
    data.lexicon.retain(|_, e| !e.senses.is_empty());
    Resource::new(data)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub synset: String,
    /// Outcome of the rerun: `accepted`, a rejection reason, or `unprocessable`.
    pub status: String,
    pub gold: Vec<String>,
    pub system: Vec<String>,
    pub baseline: Vec<String>,
    pub system_prf: Prf,
    pub baseline_prf: Prf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scores {
    pub micro: Prf,
    pub macro_avg: Prf,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationReport {
    pub cases: Vec<CaseResult>,
    /// `None` for an empty case list.
    pub system: Option<Scores>,
    pub baseline: Option<Scores>,
}

impl AblationReport {
    pub fn render(&self, title: &str) -> String {
        let mut out = format!("{title}: {} cases\n", self.cases.len());
        for c in &self.cases {
            out.push_str(&format!(
                "  {:<24} {:<28} system {{{}}} gold {{{}}} {}\n",
                c.synset,
                c.status,
                c.system.join(", "),
                c.gold.join(", "),
                c.system_prf
            ));
        }
        for (name, s) in [("system", &self.system), ("baseline", &self.baseline)] {
            if let Some(s) = s {
                out.push_str(&format!("{name:<8} micro {}  macro {}\n", s.micro, s.macro_avg));
            }
        }
        out
    }
}

fn aggregate(rows: &[(BTreeSet<String>, &BTreeSet<String>)]) -> Option<Scores> {
    if rows.is_empty() {
        return None;
    }
    let (mut correct, mut predicted, mut gold) = (0, 0, 0);
    let (mut p, mut r) = (0.0, 0.0);
    for (pred, g) in rows {
        correct += pred.intersection(g).count();
        predicted += pred.len();
        gold += g.len();
        let x = prf(pred, g);
        p += x.precision;
        r += x.recall;
    }
    let n = rows.len() as f64;
    Some(Scores {
        micro: Prf::from_counts(correct, predicted, gold),
        macro_avg: Prf::from_pr(p / n, r / n),
    })
}

/// The candidate scored for a case: the accepted one, else the first one
/// built, even if a consistency check rejected it.
fn rerun(resource: &Resource, corpus: &Corpus, rules: &RuleSet, synset: &str) -> Result<(String, Option<Candidate>)> {
    let learner = Learner::new(resource, corpus, rules);
    let outcome = learner.process(corpus.get(synset)?)?;
    let status = outcome.status();
    let cand = outcome
        .accepted()
        .or_else(|| outcome.attempts.iter().find_map(|a| a.candidate.as_ref()))
        .cloned();
    let label = match (status.reason(), &cand) {
        (None, _) => "accepted".to_string(),
        (Some(r), Some(_)) => r.as_str().to_string(),
        (Some(r), None) => format!("unprocessable:{}", r.as_str()),
    };
    Ok((label, cand))
}

fn run_ablation(
    resource: &Resource,
    corpus: &Corpus,
    rules: &RuleSet,
    cases: &[AblationCase],
    gold: impl Fn(&AblationCase) -> BTreeSet<String> + Sync,
    predict: impl Fn(&Candidate) -> BTreeSet<String> + Sync,
    baseline: BTreeSet<String>,
) -> Result<AblationReport> {
    let results: Vec<(CaseResult, BTreeSet<String>, BTreeSet<String>)> = cases
        .par_iter()
        .map(|c| {
            let ty = check_case(resource, corpus, c)?;
            let ablated = ablate(resource, corpus, &c.synset, &ty)?;
            let (status, cand) = rerun(&ablated, corpus, rules, &c.synset)?;
            let system = cand.as_ref().map(&predict).unwrap_or_default();
            let g = gold(c);
            let row = CaseResult {
                synset: c.synset.clone(),
                status,
                gold: g.iter().cloned().collect(),
                system: system.iter().cloned().collect(),
                baseline: baseline.iter().cloned().collect(),
                system_prf: prf(&system, &g),
                baseline_prf: prf(&baseline, &g),
            };
            Ok((row, system, g))
        })
        .collect::<Result<_>>()?;
    let sys: Vec<_> = results.iter().map(|(_, s, g)| (s.clone(), g)).collect();
    let base: Vec<_> = results.iter().map(|(_, _, g)| (baseline.clone(), g)).collect();
    Ok(AblationReport {
        system: aggregate(&sys),
        baseline: aggregate(&base),
        cases: results.iter().map(|(r, _, _)| r.clone()).collect(),
    })
}

/// Role-set identification against gold; the baseline always says {AGENT, AFFECTED}.
pub fn ablate_roles(resource: &Resource, corpus: &Corpus, rules: &RuleSet, cases: &[AblationCase]) -> Result<AblationReport> {
    let baseline = [crate::model::roles::AGENT, crate::model::roles::AFFECTED]
        .into_iter()
        .map(str::to_string)
        .collect();
    run_ablation(
        resource,
        corpus,
        rules,
        cases,
        |c| c.gold_roles.iter().map(|r| r.as_str().to_string()).collect(),
        |cand| cand.assignment.roles().iter().map(|r| r.as_str().to_string()).collect(),
        baseline,
    )
}

pub const TRANSITIVE_TEMPLATE: &str = "AGENT-AFFECTED-XP-TEMPL";

/// Template assignment against gold; the baseline always says the transitive template.
pub fn ablate_templates(
    resource: &Resource,
    corpus: &Corpus,
    rules: &RuleSet,
    cases: &[AblationCase],
) -> Result<AblationReport> {
    for c in cases {
        check_template_case(resource, corpus, c)?;
    }
    run_ablation(
        resource,
        corpus,
        rules,
        cases,
        |c| c.gold_templates.clone(),
        |cand| cand.templates.iter().cloned().collect(),
        BTreeSet::from([TRANSITIVE_TEMPLATE.to_string()]),
    )
}
