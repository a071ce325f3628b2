//! Learning new ontology types, lexical entries and axioms from parsed glosses.

mod axiom;
mod bootstrap;
mod candidate;
mod classify;
mod roles;
mod rules;

pub use axiom::generate_axiom;
pub use bootstrap::{bootstrap, group_accepted, pending, BootstrapOptions, BuildReport, IterationReport, SynsetReport};
pub use candidate::{
    aspect_conflict, check_consistency, lexical_entries, name_new_type, Attempt, Candidate, Learner, Reason, Status,
    SynsetOutcome,
};
pub use classify::{classify, filler_types, has_lexical_filler, main_modifiers, main_predicate, Classification, GroupKey};
pub use roles::{
    derive_preferences, derive_templates, governing_edge, identify_roles, Binding, Evidence, InducedConstraints,
    RoleAssignment, RoleError,
};
pub use rules::{Emit, Firing, PhraseRule, RuleSet, SkeletonRule, SkeletonRules, Step, CORE_ROLE, LIFT};
