//! The iterative build: learn against a snapshot, merge, repeat.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::candidate::{Candidate, Learner, Reason, Status, SynsetOutcome};
use super::classify::{filler_types, has_lexical_filler, GroupKey};
use super::rules::RuleSet;
use crate::corpus::{Corpus, Synset};
use crate::error::{Error, Result};
use crate::model::{OntType, Pos, Provenance, Resource, ResourceData, TypeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BootstrapOptions {
    pub max_iterations: u32,
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            max_iterations: 3,
            jobs: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationReport {
    pub iteration: u32,
    pub processed: usize,
    pub accepted: usize,
    pub rejected: BTreeMap<Reason, usize>,
    pub new_types: Vec<TypeId>,
    pub new_lexical_senses: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynsetReport {
    pub synset: String,
    /// Iteration of the last attempt.
    pub iteration: u32,
    #[serde(flatten)]
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_type: Option<TypeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placement: Option<TypeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BuildReport {
    pub processed: usize,
    pub accepted: usize,
    pub rejected: BTreeMap<Reason, usize>,
    pub rejection_rate: f64,
    pub new_types: usize,
    pub new_lexical_senses: usize,
    pub iterations: Vec<IterationReport>,
    pub synsets: Vec<SynsetReport>,
}

impl BuildReport {
    pub fn rejected_total(&self) -> usize {
        self.rejected.values().sum()
    }

    pub fn status_of(&self, synset: &str) -> Option<&SynsetReport> {
        self.synsets.iter().find(|s| s.synset == synset)
    }

    /// Plain-text summary for terminals.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "processed {}  accepted {}  rejected {}  rejection rate {:.3}\nnew types {}  new lexical senses {}  iterations {}\n",
            self.processed,
            self.accepted,
            self.rejected_total(),
            self.rejection_rate,
            self.new_types,
            self.new_lexical_senses,
            self.iterations.len()
        );
        for (reason, n) in &self.rejected {
            out.push_str(&format!("  {reason:<24}{n}\n"));
        }
        out
    }
}

/// Verb synsets none of whose senses is attached to a type yet.
pub fn pending<'c>(resource: &Resource, corpus: &'c Corpus) -> Vec<&'c Synset> {
    let done = resource.incorporated_keys();
    corpus
        .iter()
        .filter(|s| s.pos() == Some(Pos::V))
        .filter(|s| s.senses.iter().all(|k| !done.contains(k)))
        .collect()
}

/// Accepted candidates in merge order, sharing a type when they were grouped.
/// Each unit is led by its lexicographically first member.
pub fn group_accepted(candidates: Vec<Candidate>) -> Vec<Vec<Candidate>> {
    let mut sorted = candidates;
    sorted.sort_by(|a, b| a.synset.cmp(&b.synset));
    let mut units: Vec<Vec<Candidate>> = Vec::new();
    let mut by_key: BTreeMap<GroupKey, usize> = BTreeMap::new();
    for c in sorted {
        if has_lexical_filler(&c.graph, &c.assignment) {
            let key = GroupKey {
                placement: c.placement().clone(),
                definition_type: c.classification.definition_type.clone(),
                fillers: filler_types(&c.graph, &c.assignment),
            };
            if let Some(&i) = by_key.get(&key) {
                units[i].push(c);
                continue;
            }
            by_key.insert(key, units.len());
        }
        units.push(vec![c]);
    }
    units
}

fn merge_unit(data: &mut ResourceData, unit: &[Candidate], iteration: u32) -> Result<usize> {
    let lead = &unit[0];
    if data.ontology.contains_key(&lead.new_type) {
        return Err(Error::invalid(format!("type {}", lead.new_type), "new type name already in use"));
    }
    let mut ty = OntType::new(lead.new_type.clone(), Some(lead.placement().clone()));
    ty.roles = lead.roles.clone();
    ty.axioms = vec![lead.axiom.id.clone()];
    ty.synsets = unit.iter().flat_map(|c| c.senses.iter().cloned()).collect();
    ty.provenance = Provenance::Derived(iteration);
    data.ontology.insert(ty.id.clone(), ty);
    data.axioms.insert(lead.axiom.id.clone(), lead.axiom.clone());
    let mut added = 0;
    for c in unit {
        for entry in super::candidate::lexical_entries(&c.senses, &lead.new_type, &lead.templates) {
            let slot = data.lexicon.entry(entry.key()).or_insert_with(|| crate::model::LexEntry {
                word: entry.word.clone(),
                pos: entry.pos,
                senses: Vec::new(),
            });
            for s in entry.senses {
                if slot.senses.iter().all(|x| x.ty != s.ty) {
                    slot.senses.push(s);
                    added += 1;
                }
            }
        }
    }
    Ok(added)
}

/// Learn from `corpus` until an iteration accepts nothing or the iteration
/// limit is hit. The result does not depend on `jobs`.
pub fn bootstrap(
    corpus: &Corpus,
    seed: Resource,
    rules: &RuleSet,
    options: BootstrapOptions,
) -> Result<(Resource, BuildReport)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| Error::invalid("bootstrap", e.to_string()))?;
    let mut resource = seed;
    let mut report = BuildReport::default();
    let mut last: BTreeMap<String, SynsetReport> = BTreeMap::new();

    for iteration in 1..=options.max_iterations {
        let todo = pending(&resource, corpus);
        if todo.is_empty() {
            break;
        }
        let outcomes: Vec<SynsetOutcome> = {
            let learner = Learner::new(&resource, corpus, rules);
            pool.install(|| todo.par_iter().map(|s| learner.process(s)).collect::<Result<Vec<_>>>())?
        };
        let mut it = IterationReport {
            iteration,
            processed: outcomes.len(),
            ..Default::default()
        };
        let mut accepted = Vec::new();
        for o in &outcomes {
            match o.status() {
                Status::Accepted => accepted.push(o.accepted().expect("accepted outcome").clone()),
                Status::Rejected(r) => *it.rejected.entry(r).or_default() += 1,
            }
            last.insert(
                o.synset.clone(),
                SynsetReport {
                    synset: o.synset.clone(),
                    iteration,
                    status: o.status(),
                    new_type: None,
                    placement: None,
                },
            );
        }
        it.accepted = accepted.len();
        if accepted.is_empty() {
            report.iterations.push(it);
            break;
        }
        let mut data = resource.into_data();
        for unit in group_accepted(accepted) {
            it.new_lexical_senses += merge_unit(&mut data, &unit, iteration)?;
            it.new_types.push(unit[0].new_type.clone());
            for c in &unit {
                let entry = last.get_mut(&c.synset).expect("reported above");
                entry.new_type = Some(unit[0].new_type.clone());
                entry.placement = Some(c.placement().clone());
            }
        }
        resource = Resource::new(data)?;
        report.iterations.push(it);
    }

    report.synsets = last.into_values().collect();
    report.processed = report.synsets.len();
    for s in &report.synsets {
        match s.status {
            Status::Accepted => report.accepted += 1,
            Status::Rejected(r) => *report.rejected.entry(r).or_default() += 1,
        }
    }
    report.rejection_rate = if report.processed == 0 {
        0.0
    } else {
        report.rejected_total() as f64 / report.processed as f64
    };
    let new_types: BTreeSet<&TypeId> = report.iterations.iter().flat_map(|i| &i.new_types).collect();
    report.new_types = new_types.len();
    report.new_lexical_senses = report.iterations.iter().map(|i| i.new_lexical_senses).sum();
    Ok((resource, report))
}
