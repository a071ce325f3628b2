//! Placement of a new sense in the ontology.

use std::collections::BTreeMap;

use serde::Serialize;

use super::roles::{InducedConstraints, RoleAssignment};
use super::rules::PhraseRule;
use crate::defparser::{EdgeLabel, Indicator, LfGraph, LfNode};
use crate::error::Result;
use crate::model::{Resource, SemRole, TypeId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// Type of the definition's main predicate.
    pub definition_type: TypeId,
    pub placement: TypeId,
    /// Target of the phrase rule that fired, if any.
    pub phrase_rule: Option<TypeId>,
}

/// Main predicate node: the root, or the first operand of a root operator.
pub fn main_predicate(graph: &LfGraph) -> &LfNode {
    let mut node = graph.root_node();
    while node.indicator == Indicator::Operator {
        match graph.children(&node.id).into_iter().find(|e| e.label == EdgeLabel::Operand) {
            Some(e) => node = graph.node(&e.to),
            None => break,
        }
    }
    node
}

fn flatten<'g>(graph: &'g LfGraph, id: &str, out: &mut Vec<&'g LfNode>) {
    let node = graph.node(id);
    if node.indicator == Indicator::Operator {
        for e in graph.children(id) {
            flatten(graph, &e.to, out);
        }
    } else {
        out.push(node);
    }
}

/// Modifier nodes on the main predicate, operator levels flattened.
pub fn main_modifiers(graph: &LfGraph) -> Vec<&LfNode> {
    let main = main_predicate(graph);
    let mut out = Vec::new();
    for e in graph.children(&main.id).into_iter().filter(|e| e.label == EdgeLabel::Mod) {
        flatten(graph, &e.to, &mut out);
    }
    out
}

pub fn classify(
    resource: &Resource,
    phrase_rules: &[PhraseRule],
    graph: &LfGraph,
    constraints: &InducedConstraints,
) -> Result<Classification> {
    let d = main_predicate(graph).ty.clone();
    let induced = &constraints.induced_type;
    let mut placement = if resource.subsumes(induced, &d)? {
        d.clone()
    } else {
        induced.clone()
    };
    let mods = main_modifiers(graph);
    let mut phrase_rule = None;
    for rule in phrase_rules {
        if !resource.subsumes(&rule.head, &d)? {
            continue;
        }
        let mut all = true;
        for m in &rule.modifiers {
            let mut found = false;
            for node in &mods {
                if resource.subsumes(m, &node.ty)? {
                    found = true;
                    break;
                }
            }
            all &= found;
        }
        if all {
            placement = rule.target.clone();
            phrase_rule = Some(rule.target.clone());
            break;
        }
    }
    Ok(Classification {
        definition_type: d,
        placement,
        phrase_rule,
    })
}

/// Types filling each bound role; gaps contribute the referential root type.
pub fn filler_types(graph: &LfGraph, assignment: &RoleAssignment) -> BTreeMap<SemRole, Vec<TypeId>> {
    assignment
        .bindings
        .iter()
        .map(|b| {
            let mut tys: Vec<TypeId> = b.nodes.iter().map(|n| graph.node(n).ty.clone()).collect();
            tys.sort();
            tys.dedup();
            (b.target_role.clone(), tys)
        })
        .collect()
}

/// Candidates with equal keys are merged into one new type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GroupKey {
    pub placement: TypeId,
    pub definition_type: TypeId,
    pub fillers: BTreeMap<SemRole, Vec<TypeId>>,
}

/// Only candidates with a lexical (non-gap) filler are grouped.
pub fn has_lexical_filler(graph: &LfGraph, assignment: &RoleAssignment) -> bool {
    assignment
        .bindings
        .iter()
        .flat_map(|b| &b.nodes)
        .any(|n| graph.node(n).indicator != Indicator::Impro)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defparser::{parse_definition, LexIndex, ParseContext};
    use crate::testutil;

    fn classify_synset(synset: &str, induced: &str) -> Classification {
        let r = testutil::seed();
        let rules = testutil::rules(&r);
        let c = testutil::corpus();
        let def = c.get(synset).unwrap().definitions().remove(0);
        let g = parse_definition(&LexIndex::new(&r), &def, &ParseContext::default())
            .unwrap()
            .remove(0);
        let k = InducedConstraints::new(&r, &TypeId::new(induced).unwrap()).unwrap();
        classify(&r, &rules.phrase, &g, &k).unwrap()
    }

    #[test]
    fn refines_to_a_more_specific_definition_type() {
        let c = classify_synset("breakfast%2:34:00::", "ONT::CONSUME");
        assert_eq!(c.definition_type.as_str(), "ONT::EAT");
        assert_eq!(c.placement.as_str(), "ONT::EAT");
    }

    #[test]
    fn phrase_rule_overrides_the_definition_type() {
        let c = classify_synset("breeze%2:38:00::", "ONT::MOVE");
        assert_eq!(c.definition_type.as_str(), "ONT::GO-ON");
        assert_eq!(c.placement.as_str(), "ONT::MOVE-RAPIDLY");
        assert!(c.phrase_rule.is_some());
    }

    #[test]
    fn falls_back_to_the_induced_type() {
        let c = classify_synset("kill%2:35:00::", "ONT::KILL");
        assert_eq!(c.definition_type.as_str(), "ONT::CAUSE-EFFECT");
        assert_eq!(c.placement.as_str(), "ONT::KILL");
        let c = classify_synset("pinion%2:35:00::", "ONT::CONFINE");
        assert_eq!(c.placement.as_str(), "ONT::CONFINE");
    }

    #[test]
    fn operator_root_uses_first_operand() {
        let c = classify_synset("abrade%2:35:01::", "ONT::RUB-SCRAPE-WIPE");
        assert_eq!(c.definition_type.as_str(), "ONT::RUB-SCRAPE-WIPE");
    }
}
