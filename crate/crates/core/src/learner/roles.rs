//! Role identification, preference transfer and template filtering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::rules::SkeletonRules;
use crate::defparser::{EdgeLabel, Indicator, LfEdge, LfGraph, Mark};
use crate::error::Result;
use crate::model::{Preference, Resource, RoleSpec, SemRole, TypeId};

/// What the mapping says about a synset before its gloss is read.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedConstraints {
    pub induced_type: TypeId,
    pub candidate_roles: Vec<RoleSpec>,
    pub candidate_templates: Vec<String>,
}

impl InducedConstraints {
    /// Templates come from lexicon words of the type and its descendants; when
    /// there are none, from the nearest ancestor region that has some.
    pub fn new(resource: &Resource, induced: &TypeId) -> Result<Self> {
        let mut candidate_templates = Vec::new();
        for t in resource.ancestors(induced)? {
            let pool: BTreeSet<&str> = resource
                .senses_under(t)
                .flat_map(|(_, s)| s.templates.iter().map(String::as_str))
                .collect();
            if !pool.is_empty() {
                candidate_templates = pool.into_iter().map(str::to_string).collect();
                break;
            }
        }
        Ok(InducedConstraints {
            induced_type: induced.clone(),
            candidate_roles: resource.effective_roles(induced)?,
            candidate_templates,
        })
    }

    pub fn role_names(&self) -> Vec<SemRole> {
        self.candidate_roles.iter().map(|s| s.role.clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Evidence {
    Impro,
    IndefPronoun,
    Parenthetical,
    IndefNoun,
    CertainMarked,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evidence::Impro => "IMPRO",
            Evidence::IndefPronoun => "INDEF-PRONOUN",
            Evidence::Parenthetical => "PARENTHETICAL",
            Evidence::IndefNoun => "INDEF-NOUN",
            Evidence::CertainMarked => "CERTAIN-MARKED",
        })
    }
}

impl Evidence {
    fn of_marks(marks: &BTreeSet<Mark>) -> Option<Evidence> {
        [
            (Mark::Parenthetical, Evidence::Parenthetical),
            (Mark::CertainMarked, Evidence::CertainMarked),
            (Mark::IndefPronoun, Evidence::IndefPronoun),
            (Mark::IndefNoun, Evidence::IndefNoun),
        ]
        .into_iter()
        .find(|(m, _)| marks.contains(m))
        .map(|(_, e)| e)
    }

    /// Marked nouns contribute their own type as preference.
    pub fn uses_noun_type(self) -> bool {
        matches!(self, Evidence::Parenthetical | Evidence::IndefNoun)
    }
}

/// One target role and the LF node(s) filling it. Several nodes share a
/// binding only when they are alternatives under one operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Binding {
    pub target_role: SemRole,
    pub nodes: Vec<String>,
    pub rule_id: String,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoleAssignment {
    pub bindings: Vec<Binding>,
}

impl RoleAssignment {
    pub fn roles(&self) -> Vec<SemRole> {
        self.bindings.iter().map(|b| b.target_role.clone()).collect()
    }

    pub fn role_of(&self, node: &str) -> Option<&SemRole> {
        self.bindings
            .iter()
            .find(|b| b.nodes.iter().any(|n| n == node))
            .map(|b| &b.target_role)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoleError {
    UnmatchedGap(String),
    DuplicateRole(SemRole),
}

fn id_number(id: &str) -> usize {
    id.trim_start_matches('X').parse().unwrap_or(usize::MAX)
}

fn lowest_common_ancestor<'g>(g: &'g LfGraph, ids: &[&str]) -> Option<&'g str> {
    let chains: Vec<Vec<&str>> = ids
        .iter()
        .map(|id| {
            let mut chain: Vec<&str> = g.path_to(id).iter().map(|e| e.from.as_str()).collect();
            chain.push(g.node(id).id.as_str());
            chain
        })
        .collect();
    let mut lca = None;
    for depth in 0.. {
        let Some(first) = chains[0].get(depth) else { break };
        if chains.iter().all(|c| c.get(depth) == Some(first)) {
            lca = Some(*first);
        } else {
            break;
        }
    }
    lca
}

/// Apply the highest-priority skeleton rule to every gap and marked node.
pub fn identify_roles(
    resource: &Resource,
    rules: &SkeletonRules,
    graph: &LfGraph,
) -> std::result::Result<RoleAssignment, RoleError> {
    let mut nodes: Vec<_> = graph
        .nodes
        .iter()
        .filter(|n| n.indicator == Indicator::Impro || !n.marks.is_empty())
        .collect();
    nodes.sort_by_key(|n| id_number(&n.id));

    let mut by_role: BTreeMap<SemRole, Vec<(String, String, Evidence)>> = BTreeMap::new();
    let mut order: Vec<SemRole> = Vec::new();
    for n in nodes {
        let labels: Vec<EdgeLabel> = graph.path_to(&n.id).into_iter().map(|e| e.label.clone()).collect();
        let firing = rules.fire(resource, &labels);
        let evidence = match n.indicator {
            Indicator::Impro => Evidence::Impro,
            _ => Evidence::of_marks(&n.marks).expect("filtered on marks"),
        };
        let Some(firing) = firing else {
            if evidence == Evidence::Impro {
                return Err(RoleError::UnmatchedGap(n.id.clone()));
            }
            continue;
        };
        if !by_role.contains_key(&firing.role) {
            order.push(firing.role.clone());
        }
        by_role
            .entry(firing.role)
            .or_default()
            .push((n.id.clone(), firing.rule.id.clone(), evidence));
    }

    let mut bindings = Vec::new();
    for role in order {
        let fills = &by_role[&role];
        if fills.len() > 1 {
            let ids: Vec<&str> = fills.iter().map(|(id, _, _)| id.as_str()).collect();
            let under_operator = lowest_common_ancestor(graph, &ids)
                .is_some_and(|lca| graph.node(lca).indicator == Indicator::Operator);
            if !under_operator {
                return Err(RoleError::DuplicateRole(role));
            }
        }
        let (_, rule_id, evidence) = &fills[0];
        bindings.push(Binding {
            target_role: role,
            nodes: fills.iter().map(|(id, _, _)| id.clone()).collect(),
            rule_id: rule_id.clone(),
            evidence: *evidence,
        });
    }
    Ok(RoleAssignment { bindings })
}

/// The edge above `id` that assigns its role, skipping operator levels.
pub fn governing_edge<'g>(graph: &'g LfGraph, id: &str) -> Option<&'g LfEdge> {
    let mut cur = id;
    while let Some(e) = graph.in_edge(cur) {
        if e.label != EdgeLabel::Operand {
            return Some(e);
        }
        cur = &e.from;
    }
    None
}

/// Preference of each bound role: the governing predicate's preference on
/// the role the node fills, or the noun's own type for marked nouns.
pub fn derive_preferences(resource: &Resource, graph: &LfGraph, assignment: &RoleAssignment) -> Result<Vec<RoleSpec>> {
    let mut out = Vec::new();
    for b in &assignment.bindings {
        let node = graph.node(&b.nodes[0]);
        let preference = if b.evidence.uses_noun_type() {
            Preference::Type(node.ty.clone())
        } else {
            match governing_edge(graph, &node.id) {
                Some(e) => match e.label.role() {
                    Some(role) => resource
                        .role_spec(&graph.node(&e.from).ty, role)?
                        .map(|s| s.preference)
                        .unwrap_or_default(),
                    None => Preference::none(),
                },
                None => Preference::none(),
            }
        };
        out.push(RoleSpec::new(b.target_role.clone(), preference));
    }
    Ok(out)
}

fn canonical_set(resource: &Resource, roles: impl IntoIterator<Item = SemRole>) -> BTreeSet<SemRole> {
    roles.into_iter().map(|r| resource.canonical_role(&r).clone()).collect()
}

/// Keep pool templates whose required roles were all identified; if none
/// survive, fall back to the most used template(s) with exactly those roles.
pub fn derive_templates(resource: &Resource, roles: &[SemRole], constraints: &InducedConstraints) -> Result<Vec<String>> {
    let have = canonical_set(resource, roles.iter().cloned());
    let mut kept = Vec::new();
    for name in &constraints.candidate_templates {
        let needs = canonical_set(resource, resource.template(name)?.required_roles());
        if needs.is_subset(&have) {
            kept.push(name.clone());
        }
    }
    if !kept.is_empty() {
        return Ok(kept);
    }
    let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
    for e in resource.lexicon.values() {
        for s in &e.senses {
            for t in &s.templates {
                *uses.entry(t.as_str()).or_default() += 1;
            }
        }
    }
    let exact: Vec<(&str, usize)> = resource
        .templates
        .values()
        .filter(|t| canonical_set(resource, t.required_roles()) == have)
        .map(|t| (t.name.as_str(), uses.get(t.name.as_str()).copied().unwrap_or(0)))
        .collect();
    let best = exact.iter().map(|(_, n)| *n).max().unwrap_or(0);
    Ok(exact
        .into_iter()
        .filter(|(_, n)| *n == best)
        .map(|(t, _)| t.to_string())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defparser::{parse_definition, LexIndex, ParseContext};
    use crate::testutil;

    fn top(r: &Resource, synset: &str) -> LfGraph {
        let c = testutil::corpus();
        let def = c.get(synset).unwrap().definitions().remove(0);
        parse_definition(&LexIndex::new(r), &def, &ParseContext::default())
            .unwrap()
            .remove(0)
    }

    fn summary(a: &RoleAssignment) -> Vec<String> {
        a.bindings
            .iter()
            .map(|b| format!("{}<-{} {} {}", b.target_role, b.nodes.join("+"), b.rule_id, b.evidence))
            .collect()
    }

    fn assign(synset: &str) -> std::result::Result<RoleAssignment, RoleError> {
        let r = testutil::seed();
        let rules = testutil::rules(&r);
        identify_roles(&r, &rules.skeleton, &top(&r, synset))
    }

    #[test]
    fn direct_gaps_lift_their_labels() {
        let a = assign("censure%2:32:00::").unwrap();
        assert_eq!(summary(&a), ["AGENT<-X1 direct-core IMPRO", "AFFECTED<-X3 direct-core IMPRO"]);
    }

    #[test]
    fn embedded_gap_becomes_affected() {
        let a = assign("agitate%2:37:00::").unwrap();
        assert_eq!(summary(&a), ["AGENT<-X1 direct-core IMPRO", "AFFECTED<-X3 embedded-core IMPRO"]);
        let a = assign("kill%2:35:00::").unwrap();
        assert_eq!(a.roles(), [SemRole::new("AGENT").unwrap(), SemRole::new("AFFECTED").unwrap()]);
    }

    #[test]
    fn ground_and_comparison_gaps_become_neutral_roles() {
        let a = assign("approach%2:38:00::").unwrap();
        assert_eq!(summary(&a), ["AGENT<-X1 direct-core IMPRO", "NEUTRAL<-X4 ground-of-result IMPRO"]);
        let a = assign("outweigh%2:42:00::").unwrap();
        assert_eq!(summary(&a), ["NEUTRAL<-X1 direct-core IMPRO", "NEUTRAL1<-X4 compar-of-formal IMPRO"]);
    }

    #[test]
    fn figure_gap_lifts_the_outer_role() {
        let a = assign("pinion%2:35:00::").unwrap();
        assert_eq!(summary(&a), ["AGENT<-X1 direct-core IMPRO", "AFFECTED<-X4 figure-of-core IMPRO"]);
    }

    #[test]
    fn alternatives_under_or_share_a_role() {
        let a = assign("bring%2:38:00::").unwrap();
        assert_eq!(a.bindings.len(), 2);
        assert_eq!(a.bindings[1].nodes.len(), 2);
        assert_eq!(a.bindings[1].evidence, Evidence::IndefPronoun);
        let a = assign("charge%2:40:00::").unwrap();
        assert!(a.bindings.iter().all(|b| b.nodes.len() == 2));
    }

    #[test]
    fn unmatched_gap_is_reported() {
        // The object of "consider ... obligatory" sits as FIGURE under FORMAL.
        assert_eq!(assign("ask%2:32:05::"), Err(RoleError::UnmatchedGap("X3".into())));
    }

    #[test]
    fn preferences_transfer_from_the_embedded_predicate() {
        let r = testutil::seed();
        let rules = testutil::rules(&r);
        let g = top(&r, "kill%2:35:00::");
        let a = identify_roles(&r, &rules.skeleton, &g).unwrap();
        let prefs = derive_preferences(&r, &g, &a).unwrap();
        let affected = prefs.iter().find(|s| s.role.as_str() == "AFFECTED").unwrap();
        assert_eq!(affected.preference, Preference::Features(r.vocabulary.parse_features("LIVING+").unwrap()));

        let g = top(&r, "remit%2:40:00::");
        let a = identify_roles(&r, &rules.skeleton, &g).unwrap();
        let prefs = derive_preferences(&r, &g, &a).unwrap();
        let affected = prefs.iter().find(|s| s.role.as_str() == "AFFECTED").unwrap();
        assert_eq!(affected.preference, Preference::Type(TypeId::new("ONT::MONEY").unwrap()));

        // NEUTRAL of HAVE-PROPERTY declares nothing.
        let g = top(&r, "outweigh%2:42:00::");
        let a = identify_roles(&r, &rules.skeleton, &g).unwrap();
        assert!(derive_preferences(&r, &g, &a).unwrap()[0].preference.is_empty());
    }

    #[test]
    fn templates_are_filtered_then_backed_off() {
        let r = testutil::seed();
        let roles = |xs: &[&str]| xs.iter().map(|x| SemRole::new(x).unwrap()).collect::<Vec<_>>();
        let c = InducedConstraints::new(&r, &TypeId::new("ONT::CAUSE-EFFECT").unwrap()).unwrap();
        assert!(c.candidate_templates.contains(&"AGENT-FORMAL-SUBJCONTROL-TEMPL".to_string()));
        let t = derive_templates(&r, &roles(&["AGENT", "AFFECTED"]), &c).unwrap();
        assert!(!t.contains(&"AGENT-FORMAL-SUBJCONTROL-TEMPL".to_string()));
        assert!(t.contains(&"AGENT-AFFECTED-XP-TEMPL".to_string()));

        let mut empty = c.clone();
        empty.candidate_templates.clear();
        let t = derive_templates(&r, &roles(&["AGENT", "AFFECTED"]), &empty).unwrap();
        assert_eq!(t, ["AGENT-AFFECTED-XP-TEMPL"]);

        let pool = derive_templates(&r, &roles(&["AGENT", "AFFECTED", "FORMAL"]), &c).unwrap();
        assert_eq!(pool, c.candidate_templates);
    }

    #[test]
    fn kill_borrows_templates_from_its_ancestor_region() {
        let r = testutil::seed();
        let c = InducedConstraints::new(&r, &TypeId::new("ONT::KILL").unwrap()).unwrap();
        let parent = InducedConstraints::new(&r, &TypeId::new("ONT::CAUSE-EFFECT").unwrap()).unwrap();
        assert_eq!(c.candidate_templates, parent.candidate_templates);
        assert_eq!(c.candidate_roles, r.effective_roles(&TypeId::new("ONT::KILL").unwrap()).unwrap());
    }
}
