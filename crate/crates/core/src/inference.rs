//! Forward chaining over ground event facts.
//!
//! A fact is an event atom with constant (or nested event) arguments, an
//! optional negation, and a time tag `AT(t)`, `AFTER(t)` or `BEFORE(t)`.
//! Derived events co-occur with the fact that triggered them and take its
//! time. `[ONT::BECOME S]` at `AT(t)` yields `not S` at `AT(t)` and `S` at
//! `AFTER(t)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{parse_expr, Atom, AtomArg, Axiom, AxiomId, LogicalExpr, Term};
use crate::model::{Resource, SemRole, TypeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TimeTag {
    Before,
    At,
    After,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Time {
    pub tag: TimeTag,
    pub instant: String,
}

impl Time {
    pub fn at(instant: &str) -> Self {
        Time {
            tag: TimeTag::At,
            instant: instant.to_string(),
        }
    }

    pub fn after(instant: &str) -> Self {
        Time {
            tag: TimeTag::After,
            instant: instant.to_string(),
        }
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.tag {
            TimeTag::Before => "BEFORE",
            TimeTag::At => "AT",
            TimeTag::After => "AFTER",
        };
        write!(f, "{tag}({})", self.instant)
    }
}

impl std::str::FromStr for Time {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("time", format!("expected AT(t), AFTER(t) or BEFORE(t), got {s:?}"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let instant = s[open + 1..].strip_suffix(')').ok_or_else(bad)?.trim();
        let tag = match s[..open].trim().to_ascii_uppercase().as_str() {
            "AT" => TimeTag::At,
            "AFTER" => TimeTag::After,
            "BEFORE" => TimeTag::Before,
            _ => return Err(bad()),
        };
        if instant.is_empty() {
            return Err(bad());
        }
        Ok(Time {
            tag,
            instant: instant.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Arg {
    Const(String),
    Event(Box<Event>),
}

/// An event or state atom with ground arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Event {
    pub ty: TypeId,
    pub id: Option<String>,
    pub args: BTreeMap<SemRole, Arg>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundFact {
    pub event: Event,
    pub negated: bool,
    pub time: Time,
}

impl Event {
    pub fn new(ty: TypeId) -> Self {
        Event {
            ty,
            id: None,
            args: BTreeMap::new(),
        }
    }

    pub fn with(mut self, role: &str, value: &str) -> Result<Self> {
        self.args.insert(SemRole::new(role)?, Arg::Const(value.to_string()));
        Ok(self)
    }

    fn to_expr(&self) -> LogicalExpr {
        let mut atom = Atom::new(self.ty.clone());
        atom.id = self.id.clone().map(Term::Const);
        for (role, arg) in &self.args {
            atom = atom.arg(role, arg.to_term());
        }
        LogicalExpr::Atom(atom)
    }

    /// Roles must be declared on the type (nested events included).
    pub fn validate(&self, resource: &Resource) -> Result<()> {
        let roles = resource.effective_roles(&self.ty)?;
        for (role, arg) in &self.args {
            let canon = resource.canonical_role(role);
            if !roles.iter().any(|s| resource.canonical_role(&s.role) == canon) {
                return Err(Error::invalid(
                    format!("fact {self}"),
                    format!("{} has no role {role}", self.ty),
                ));
            }
            if let Arg::Event(e) = arg {
                e.validate(resource)?;
            }
        }
        Ok(())
    }
}

impl Arg {
    fn to_term(&self) -> Term {
        match self {
            Arg::Const(c) => Term::Const(c.clone()),
            Arg::Event(e) => Term::Expr(Box::new(e.to_expr())),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl GroundFact {
    pub fn new(event: Event, time: Time) -> Self {
        GroundFact {
            event,
            negated: false,
            time,
        }
    }

    fn negation(&self) -> GroundFact {
        GroundFact {
            negated: !self.negated,
            ..self.clone()
        }
    }
}

impl fmt::Display for GroundFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "[NOT {}]@{}", self.event, self.time)
        } else {
            write!(f, "{}@{}", self.event, self.time)
        }
    }
}

/// Parse `[TYPE :role value ...]@AT(t)`; the time defaults to `default_time`.
/// Positional arguments take the type's roles in vocabulary order.
pub fn parse_fact(resource: &Resource, text: &str, default_time: Option<Time>) -> Result<(GroundFact, bool)> {
    let text = text.trim();
    let (body, time) = match text.rfind(']') {
        Some(end) if end + 1 < text.len() => {
            let rest = text[end + 1..].trim();
            let rest = rest.strip_prefix('@').unwrap_or(rest);
            (&text[..=end], Some(rest.parse::<Time>()?))
        }
        _ => (text, None),
    };
    let has_time = time.is_some();
    let time = time
        .or(default_time)
        .ok_or_else(|| Error::invalid(format!("fact {text}"), "missing time tag"))?;
    let (negated, expr) = match parse_expr(body)? {
        LogicalExpr::Not(x) => (true, *x),
        x => (false, x),
    };
    let LogicalExpr::Atom(atom) = expr else {
        return Err(Error::invalid(format!("fact {text}"), "a fact is a single atom"));
    };
    let event = event_from_atom(resource, &atom)?;
    event.validate(resource)?;
    Ok((
        GroundFact {
            event,
            negated,
            time,
        },
        has_time,
    ))
}

fn event_from_atom(resource: &Resource, atom: &Atom) -> Result<Event> {
    let effective = resource.effective_roles(&atom.ty)?;
    let mut positional = resource
        .vocabulary
        .roles
        .iter()
        .filter(|r| effective.iter().any(|s| &s.role == *r))
        .cloned()
        .collect::<Vec<_>>()
        .into_iter();
    let mut event = Event::new(atom.ty.clone());
    event.id = match &atom.id {
        Some(Term::Const(c)) => Some(c.clone()),
        Some(_) => return Err(Error::invalid(format!("fact {}", atom.ty), ":id must be a constant")),
        None => None,
    };
    for AtomArg { role, term } in &atom.args {
        let role = match role {
            Some(r) => r.clone(),
            None => positional
                .next()
                .ok_or_else(|| Error::invalid(format!("fact {}", atom.ty), "too many positional arguments"))?,
        };
        let arg = match term {
            Term::Const(c) => Arg::Const(c.clone()),
            Term::Expr(e) => match e.as_ref() {
                LogicalExpr::Atom(a) => Arg::Event(Box::new(event_from_atom(resource, a)?)),
                _ => return Err(Error::invalid(format!("fact {}", atom.ty), "nested argument must be an atom")),
            },
            Term::Var(v) => return Err(Error::invalid(format!("fact {}", atom.ty), format!("variable ?{v} in a fact"))),
        };
        event.args.insert(role, arg);
    }
    Ok(event)
}

/// Bind an axiom to a fact. `None` when the fact's type is not under the
/// antecedent type or the fact lacks one of the antecedent roles.
/// Existential variables become constants prefixed with `skolem`.
pub fn instantiate(resource: &Resource, axiom: &Axiom, fact: &GroundFact, skolem: &str) -> Result<Option<LogicalExpr>> {
    if fact.negated || !resource.subsumes(&axiom.antecedent.ty, &fact.event.ty)? {
        return Ok(None);
    }
    let mut bound: BTreeMap<String, Term> = BTreeMap::new();
    for (role, var) in &axiom.antecedent.vars {
        let arg = fact.event.args.get(role).or_else(|| {
            let canon = resource.canonical_role(role);
            fact.event
                .args
                .iter()
                .find(|(r, _)| resource.canonical_role(r) == canon)
                .map(|(_, a)| a)
        });
        match arg {
            Some(a) => {
                bound.insert(var.clone(), a.to_term());
            }
            None => return Ok(None),
        }
    }
    for v in &axiom.existentials {
        bound.insert(v.clone(), Term::Const(format!("{skolem}{v}")));
    }
    Ok(Some(axiom.consequent.substitute(&|v| bound.get(v).cloned())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub axiom: AxiomId,
    /// Index of the triggering fact in [`Closure::facts`].
    pub from: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureFact {
    pub fact: GroundFact,
    pub depth: usize,
    pub derivation: Option<Derivation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disjunction {
    pub expr: String,
    pub time: Time,
    pub derivation: Derivation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Closure {
    pub facts: Vec<ClosureFact>,
    pub disjunctions: Vec<Disjunction>,
    /// More facts would have been derived with a larger depth budget.
    pub depth_exhausted: bool,
    #[serde(skip)]
    index: BTreeSet<GroundFact>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub fact: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axiom: Option<AxiomId>,
}

impl Closure {
    pub fn contains(&self, fact: &GroundFact) -> bool {
        self.index.contains(fact)
    }

    fn add(&mut self, fact: GroundFact, depth: usize, derivation: Option<Derivation>) -> Option<usize> {
        if !self.index.insert(fact.clone()) {
            return None;
        }
        self.facts.push(ClosureFact {
            fact,
            depth,
            derivation,
        });
        Some(self.facts.len() - 1)
    }

    /// Derivation chain from fact `i` back to an input fact, input first.
    pub fn trace(&self, i: usize) -> Vec<TraceStep> {
        let mut out = Vec::new();
        let mut cur = Some(i);
        while let Some(j) = cur {
            let f = &self.facts[j];
            out.push(TraceStep {
                fact: f.fact.to_string(),
                axiom: f.derivation.as_ref().map(|d| d.axiom.clone()),
            });
            cur = f.derivation.as_ref().map(|d| d.from);
        }
        out.reverse();
        out
    }

    /// Pairs `S` and `not S` holding at the same time.
    pub fn contradictions(&self) -> Vec<(GroundFact, GroundFact)> {
        self.facts
            .iter()
            .filter(|f| !f.fact.negated)
            .filter_map(|f| {
                let neg = f.fact.negation();
                self.index.contains(&neg).then(|| (f.fact.clone(), neg))
            })
            .collect()
    }

    /// Record `expr` at `time`; returns indices of newly added facts.
    fn assert(&mut self, expr: &LogicalExpr, time: &Time, depth: usize, d: &Derivation) -> Vec<usize> {
        let mut added = Vec::new();
        let mut push = |this: &mut Closure, fact: GroundFact| {
            if let Some(i) = this.add(fact, depth, Some(d.clone())) {
                added.push(i);
            }
        };
        match expr {
            LogicalExpr::Atom(a) => {
                let (event, side) = ground_event(a);
                push(self, GroundFact::new(event, time.clone()));
                for s in side {
                    let more = self.assert(&s, time, depth, d);
                    added.extend(more);
                }
            }
            LogicalExpr::And(xs) => {
                for x in xs {
                    let more = self.assert(x, time, depth, d);
                    added.extend(more);
                }
            }
            LogicalExpr::Or(_) => self.disjunctions.push(Disjunction {
                expr: expr.to_string(),
                time: time.clone(),
                derivation: d.clone(),
            }),
            LogicalExpr::Not(x) => {
                if let LogicalExpr::Atom(a) = x.as_ref() {
                    let (event, _) = ground_event(a);
                    push(self, GroundFact::new(event, time.clone()).negation());
                }
            }
            LogicalExpr::Become(x) => {
                if let LogicalExpr::Atom(a) = x.as_ref() {
                    let (event, _) = ground_event(a);
                    let after = Time {
                        tag: TimeTag::After,
                        instant: time.instant.clone(),
                    };
                    if time.tag == TimeTag::At {
                        push(self, GroundFact::new(event.clone(), time.clone()).negation());
                        push(self, GroundFact::new(event, after));
                    } else {
                        push(self, GroundFact::new(event, time.clone()));
                    }
                }
            }
            // A variable left after binding names no event; nothing to assert.
            LogicalExpr::Var(_) => {}
        }
        added
    }
}

/// Convert a ground atom to an event; conjuncts hanging off nested
/// arguments are returned for separate assertion.
fn ground_event(a: &Atom) -> (Event, Vec<LogicalExpr>) {
    let mut side = Vec::new();
    let mut event = Event::new(a.ty.clone());
    event.id = a.id.as_ref().map(term_const);
    for arg in &a.args {
        let role = arg.role.clone().unwrap_or_else(|| SemRole::new("ARG").expect("static"));
        let value = match &arg.term {
            Term::Expr(e) => match e.as_ref() {
                LogicalExpr::Atom(inner) => {
                    let (ev, more) = ground_event(inner);
                    side.extend(more);
                    Arg::Event(Box::new(ev))
                }
                LogicalExpr::And(xs) if matches!(xs.first(), Some(LogicalExpr::Atom(_))) => {
                    let LogicalExpr::Atom(inner) = &xs[0] else { unreachable!() };
                    let (ev, more) = ground_event(inner);
                    side.extend(more);
                    side.extend(xs[1..].iter().cloned());
                    Arg::Event(Box::new(ev))
                }
                other => Arg::Const(other.to_string()),
            },
            t => Arg::Const(term_const(t)),
        };
        event.args.insert(role, value);
    }
    (event, side)
}

fn term_const(t: &Term) -> String {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(v) => format!("?{v}"),
        Term::Expr(e) => e.to_string(),
    }
}

/// Chain `axioms` from `facts` for at most `max_depth` rounds.
pub fn closure(resource: &Resource, facts: &[GroundFact], axioms: &[&Axiom], max_depth: usize) -> Result<Closure> {
    let mut c = Closure::default();
    let mut frontier: Vec<usize> = facts.iter().filter_map(|f| c.add(f.clone(), 0, None)).collect();
    let mut step = 0usize;
    for depth in 1..=max_depth.max(1) {
        let mut next = Vec::new();
        for &i in &frontier {
            for ax in axioms {
                let fact = c.facts[i].fact.clone();
                step += 1;
                if let Some(expr) = instantiate(resource, ax, &fact, &format!("sk{step}."))? {
                    let d = Derivation {
                        axiom: ax.id.clone(),
                        from: i,
                    };
                    next.extend(c.assert(&expr, &fact.time, depth, &d));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    for &i in &frontier {
        for ax in axioms {
            if instantiate(resource, ax, &c.facts[i].fact, "probe.")?.is_some() {
                c.depth_exhausted = true;
            }
        }
    }
    Ok(c)
}

/// Closure over every axiom of the resource.
pub fn resource_closure(resource: &Resource, facts: &[GroundFact], max_depth: usize) -> Result<Closure> {
    let axioms: Vec<&Axiom> = resource.axioms.values().collect();
    closure(resource, facts, &axioms, max_depth)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", content = "trace", rename_all = "lowercase")]
pub enum Entailment {
    Yes(Vec<TraceStep>),
    Unknown,
}

/// Does some closure fact match the query? A fact matches when its type is
/// under the query type, it carries every query argument, negation agrees,
/// and (if given) the time is equal.
pub fn entails(resource: &Resource, closure: &Closure, query: &GroundFact, match_time: bool) -> Result<Entailment> {
    for (i, f) in closure.facts.iter().enumerate() {
        let fact = &f.fact;
        if fact.negated != query.negated || (match_time && fact.time != query.time) {
            continue;
        }
        if !resource.subsumes(&query.event.ty, &fact.event.ty)? {
            continue;
        }
        if query.event.args.iter().all(|(r, a)| fact.event.args.get(r) == Some(a)) {
            let trace = if f.derivation.is_none() { Vec::new() } else { closure.trace(i) };
            return Ok(Entailment::Yes(trace));
        }
    }
    Ok(Entailment::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;

    fn ty(s: &str) -> TypeId {
        TypeId::new(s).unwrap()
    }

    fn kill_fact() -> GroundFact {
        let e = Event::new(ty("ONT::KILL")).with("AGENT", "x").unwrap().with("AFFECTED", "y").unwrap();
        GroundFact::new(e, Time::at("t"))
    }

    fn dead(who: &str, time: Time, negated: bool) -> GroundFact {
        GroundFact {
            event: Event::new(ty("ONT::DEAD")).with("FIGURE", who).unwrap(),
            negated,
            time,
        }
    }

    #[test]
    fn kill_instantiates_to_cause_effect() {
        let r = testutil::seed();
        let ax = &r.axioms[&AxiomId("kill".into())];
        let e = instantiate(&r, ax, &kill_fact(), "sk.").unwrap().unwrap();
        assert_eq!(e.abbreviated(), "[ONT::CAUSE-EFFECT x [ONT::DIE y]]");
        let other = GroundFact::new(Event::new(ty("ONT::EAT")).with("AGENT", "x").unwrap(), Time::at("t"));
        assert!(instantiate(&r, ax, &other, "sk.").unwrap().is_none());
    }

    #[test]
    fn subtypes_inherit_axioms() {
        let mut data = testutil::seed().into_data();
        let murder = crate::model::OntType::new(ty("ONT::MURDER"), Some(ty("ONT::KILL")));
        data.ontology.insert(murder.id.clone(), murder);
        let r = Resource::new(data).unwrap();
        let ax = &r.axioms[&AxiomId("kill".into())];
        let mut f = kill_fact();
        f.event.ty = ty("ONT::MURDER");
        let e = instantiate(&r, ax, &f, "sk.").unwrap().unwrap();
        assert_eq!(e.abbreviated(), "[ONT::CAUSE-EFFECT x [ONT::DIE y]]");
    }

    #[test]
    fn killing_makes_the_victim_dead_afterwards() {
        let r = testutil::seed();
        let c = resource_closure(&r, &[kill_fact()], 5).unwrap();
        assert!(c.contains(&dead("y", Time::after("t"), false)));
        assert!(c.contains(&dead("y", Time::at("t"), true)));
        assert!(c.contradictions().is_empty());
        assert!(!c.depth_exhausted);
        let q = dead("y", Time::after("t"), false);
        let Entailment::Yes(trace) = entails(&r, &c, &q, true).unwrap() else { panic!() };
        let axioms: Vec<_> = trace.iter().filter_map(|s| s.axiom.as_ref().map(|a| a.0.as_str())).collect();
        assert_eq!(axioms, ["kill", "cause-effect", "die"]);
        assert_eq!(entails(&r, &c, &dead("x", Time::after("t"), false), true).unwrap(), Entailment::Unknown);
    }

    #[test]
    fn depth_budget_is_reported() {
        let r = testutil::seed();
        let c = resource_closure(&r, &[kill_fact()], 1).unwrap();
        assert!(c.depth_exhausted);
        assert!(!c.contains(&dead("y", Time::after("t"), false)));
    }

    #[test]
    fn no_axioms_leave_the_input() {
        let r = testutil::seed();
        let c = closure(&r, &[kill_fact()], &[], 3).unwrap();
        assert_eq!(c.facts.len(), 1);
        let Entailment::Yes(trace) = entails(&r, &c, &kill_fact(), true).unwrap() else { panic!() };
        assert!(trace.is_empty());
    }

    #[test]
    fn disjunctions_are_kept_not_split() {
        let r = testutil::seed();
        let ax = crate::logic::Axiom {
            id: AxiomId("either".into()),
            antecedent: crate::logic::Antecedent {
                ty: ty("ONT::EAT"),
                vars: vec![(SemRole::new("AGENT").unwrap(), "agent".into())],
            },
            consequent: parse_expr("[OR [ONT::DIE :affected ?agent] [ONT::DECOMPOSE :affected ?agent]]").unwrap(),
            existentials: vec![],
        };
        let f = GroundFact::new(Event::new(ty("ONT::EAT")).with("AGENT", "x").unwrap(), Time::at("t"));
        let c = closure(&r, &[f], &[&ax], 3).unwrap();
        assert_eq!(c.facts.len(), 1);
        assert_eq!(c.disjunctions.len(), 1);
    }

    #[test]
    fn facts_parse_with_keywords_or_positions() {
        let r = testutil::seed();
        let (a, timed) = parse_fact(&r, "[ONT::KILL :agent x :affected y]@AT(t)", None).unwrap();
        assert!(timed);
        let (b, _) = parse_fact(&r, "[KILL x y] @ at(t)", None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, kill_fact());
        let (n, _) = parse_fact(&r, "[NOT [ONT::DEAD y]]@AT(t)", None).unwrap();
        assert_eq!(n, dead("y", Time::at("t"), true));
        assert!(parse_fact(&r, "[ONT::KILL :ground x]@AT(t)", None).is_err());
        assert!(parse_fact(&r, "[ONT::KILL x y]", None).is_err());
        assert_eq!(parse_fact(&r, "[ONT::KILL x y]", Some(Time::at("t"))).unwrap().0, a);
    }
}
