//! Assembling and checking a candidate from one definition.

use std::fmt;

use serde::Serialize;

use super::axiom::generate_axiom;
use super::classify::{classify, Classification};
use super::roles::{derive_preferences, derive_templates, identify_roles, InducedConstraints, RoleAssignment, RoleError};
use super::rules::RuleSet;
use crate::corpus::{Corpus, GlossToken, Synset};
use crate::defparser::{parse_definition, LexIndex, LfGraph, ParseContext, ParseFailure};
use crate::error::Result;
use crate::logic::Axiom;
use crate::mapping::Hybrid;
use crate::model::{LexEntry, LexSense, Pos, Resource, RoleSpec, SenseKey, TypeId};

/// Why a definition was not incorporated. Listed in the order checks run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Reason {
    NoMapping,
    UnknownToken,
    NoParse,
    StativeVsEvent,
    UnmatchedGap,
    DuplicateRole,
    IncomparablePlacement,
    RoleMismatch,
    PreferenceConflict,
    NoTemplate,
}

impl Reason {
    pub const ALL: [Reason; 10] = [
        Reason::NoMapping,
        Reason::UnknownToken,
        Reason::NoParse,
        Reason::StativeVsEvent,
        Reason::UnmatchedGap,
        Reason::DuplicateRole,
        Reason::IncomparablePlacement,
        Reason::RoleMismatch,
        Reason::PreferenceConflict,
        Reason::NoTemplate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Reason::NoMapping => "NO-MAPPING",
            Reason::UnknownToken => "UNKNOWN-TOKEN",
            Reason::NoParse => "NO-PARSE",
            Reason::StativeVsEvent => "STATIVE-VS-EVENT",
            Reason::UnmatchedGap => "UNMATCHED-GAP",
            Reason::DuplicateRole => "DUPLICATE-ROLE",
            Reason::IncomparablePlacement => "INCOMPARABLE-PLACEMENT",
            Reason::RoleMismatch => "ROLE-MISMATCH",
            Reason::PreferenceConflict => "PREFERENCE-CONFLICT",
            Reason::NoTemplate => "NO-TEMPLATE",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum Status {
    Accepted,
    Rejected(Reason),
}

impl Status {
    pub fn is_accepted(self) -> bool {
        self == Status::Accepted
    }

    pub fn reason(self) -> Option<Reason> {
        match self {
            Status::Accepted => None,
            Status::Rejected(r) => Some(r),
        }
    }
}

/// Everything learned from one definition of a synset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub synset: String,
    pub senses: Vec<SenseKey>,
    pub induced_type: TypeId,
    pub graph: LfGraph,
    pub assignment: RoleAssignment,
    pub classification: Classification,
    pub new_type: TypeId,
    pub roles: Vec<RoleSpec>,
    pub templates: Vec<String>,
    pub axiom: Axiom,
    pub lex_entries: Vec<LexEntry>,
    pub status: Status,
}

impl Candidate {
    pub fn placement(&self) -> &TypeId {
        &self.classification.placement
    }
}

/// One definition's outcome: a candidate, or the reason none could be built.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Attempt {
    pub definition: usize,
    pub text: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<Candidate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynsetOutcome {
    pub synset: String,
    pub attempts: Vec<Attempt>,
}

impl SynsetOutcome {
    /// First accepted definition in gloss order.
    pub fn accepted(&self) -> Option<&Candidate> {
        self.attempts
            .iter()
            .find(|a| a.status.is_accepted())
            .and_then(|a| a.candidate.as_ref())
    }

    /// Accepted, or rejected for the first definition's reason.
    pub fn status(&self) -> Status {
        if self.accepted().is_some() {
            Status::Accepted
        } else {
            self.attempts
                .first()
                .map(|a| a.status)
                .unwrap_or(Status::Rejected(Reason::NoParse))
        }
    }
}

/// `ONT::` + first lemma + `-WN` + the first sense key's digits, suffixed
/// `-2`, `-3`, ... while `taken` reports a clash.
pub fn name_new_type(senses: &[SenseKey], taken: impl Fn(&TypeId) -> bool) -> Result<TypeId> {
    let first = &senses[0];
    let lemma: String = first
        .lemma()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '-' })
        .collect();
    let base = format!("ONT::{lemma}-WN{}", first.compact_digits());
    let mut id = TypeId::new(&base)?;
    let mut n = 2;
    while taken(&id) {
        id = TypeId::new(&format!("{base}-{n}"))?;
        n += 1;
    }
    Ok(id)
}

/// A stative definition cannot define an event sense, nor the reverse.
pub fn aspect_conflict(resource: &Resource, definition_type: &TypeId, induced: &TypeId) -> Result<bool> {
    let (ds, is) = (resource.is_stative(definition_type)?, resource.is_stative(induced)?);
    Ok((ds && resource.is_event(induced)?) || (is && resource.is_event(definition_type)?))
}

/// Checks on an assembled candidate, in reason order.
pub fn check_consistency(resource: &Resource, candidate: &Candidate, constraints: &InducedConstraints) -> Result<Status> {
    let induced = &constraints.induced_type;
    let placement = candidate.placement();
    if !resource.subsumes(induced, placement)? {
        return Ok(Status::Rejected(Reason::IncomparablePlacement));
    }
    let allowed: Vec<_> = constraints
        .candidate_roles
        .iter()
        .map(|s| resource.canonical_role(&s.role))
        .collect();
    if candidate
        .roles
        .iter()
        .any(|s| !allowed.contains(&resource.canonical_role(&s.role)))
    {
        return Ok(Status::Rejected(Reason::RoleMismatch));
    }
    for spec in &candidate.roles {
        if let Some(inherited) = resource.role_spec(placement, &spec.role)? {
            if !resource.preferences_compatible(&spec.preference, &inherited.preference)? {
                return Ok(Status::Rejected(Reason::PreferenceConflict));
            }
        }
    }
    if candidate.templates.is_empty() {
        return Ok(Status::Rejected(Reason::NoTemplate));
    }
    Ok(Status::Accepted)
}

/// One entry per synset member, all pointing at the new type.
pub fn lexical_entries(senses: &[SenseKey], ty: &TypeId, templates: &[String]) -> Vec<LexEntry> {
    senses
        .iter()
        .map(|k| LexEntry {
            word: k.lemma().replace('_', " "),
            pos: Pos::V,
            senses: vec![LexSense {
                ty: ty.clone(),
                templates: templates.to_vec(),
            }],
        })
        .collect()
}

/// The per-synset pipeline against one fixed resource.
pub struct Learner<'a> {
    pub resource: &'a Resource,
    pub corpus: &'a Corpus,
    pub rules: &'a RuleSet,
    hybrid: Hybrid<'a>,
    index: LexIndex<'a>,
}

impl<'a> Learner<'a> {
    pub fn new(resource: &'a Resource, corpus: &'a Corpus, rules: &'a RuleSet) -> Self {
        Learner {
            resource,
            corpus,
            rules,
            hybrid: Hybrid::new(resource, corpus),
            index: LexIndex::new(resource),
        }
    }

    pub fn constraints(&self, synset: &str) -> Result<Option<InducedConstraints>> {
        match self.hybrid.resolve_mapping(synset)? {
            Some(r) => InducedConstraints::new(self.resource, &r.ty).map(Some),
            None => Ok(None),
        }
    }

    pub fn process(&self, synset: &Synset) -> Result<SynsetOutcome> {
        let definitions = synset.definitions();
        let mut attempts = Vec::new();
        let Some(constraints) = self.constraints(&synset.id)? else {
            attempts.push(Attempt {
                definition: 0,
                text: synset.gloss.clone(),
                status: Status::Rejected(Reason::NoMapping),
                candidate: None,
            });
            return Ok(SynsetOutcome {
                synset: synset.id.clone(),
                attempts,
            });
        };
        for (i, def) in definitions.iter().enumerate() {
            let attempt = self.attempt(synset, i, def, &constraints)?;
            let done = attempt.status.is_accepted();
            attempts.push(attempt);
            if done {
                break;
            }
        }
        Ok(SynsetOutcome {
            synset: synset.id.clone(),
            attempts,
        })
    }

    pub fn attempt(
        &self,
        synset: &Synset,
        definition: usize,
        tokens: &[GlossToken],
        constraints: &InducedConstraints,
    ) -> Result<Attempt> {
        let text = tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
        let rejected = |reason| Attempt {
            definition,
            text: text.clone(),
            status: Status::Rejected(reason),
            candidate: None,
        };
        let ctx = ParseContext {
            roles: constraints.role_names(),
        };
        let graph = match parse_definition(&self.index, tokens, &ctx) {
            Ok(mut gs) => gs.swap_remove(0),
            Err(ParseFailure::UnknownToken(_)) => return Ok(rejected(Reason::UnknownToken)),
            Err(ParseFailure::NoParse) => return Ok(rejected(Reason::NoParse)),
        };
        let r = self.resource;
        let classification = classify(r, &self.rules.phrase, &graph, constraints)?;
        if aspect_conflict(r, &classification.definition_type, &constraints.induced_type)? {
            return Ok(rejected(Reason::StativeVsEvent));
        }
        let assignment = match identify_roles(r, &self.rules.skeleton, &graph) {
            Ok(a) => a,
            Err(RoleError::UnmatchedGap(_)) => return Ok(rejected(Reason::UnmatchedGap)),
            Err(RoleError::DuplicateRole(_)) => return Ok(rejected(Reason::DuplicateRole)),
        };
        let roles = derive_preferences(r, &graph, &assignment)?;
        let templates = derive_templates(r, &assignment.roles(), constraints)?;
        let new_type = name_new_type(&synset.senses, |t| r.contains(t))?;
        let axiom = generate_axiom(&graph, &assignment, &new_type)?;
        let lex_entries = lexical_entries(&synset.senses, &new_type, &templates);
        let mut candidate = Candidate {
            synset: synset.id.clone(),
            senses: synset.senses.clone(),
            induced_type: constraints.induced_type.clone(),
            graph,
            assignment,
            classification,
            new_type,
            roles,
            templates,
            axiom,
            lex_entries,
            status: Status::Accepted,
        };
        candidate.status = check_consistency(r, &candidate, constraints)?;
        Ok(Attempt {
            definition,
            text,
            status: candidate.status,
            candidate: Some(candidate),
        })
    }
}
