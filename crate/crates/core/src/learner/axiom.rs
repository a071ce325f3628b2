//! Rewriting a parsed definition as an entailment axiom.

use super::roles::RoleAssignment;
use crate::defparser::{EdgeLabel, Indicator, LfGraph, OpKind};
use crate::error::{Error, Result};
use crate::logic::{Antecedent, Atom, Axiom, AxiomId, LogicalExpr, Term};
use crate::model::{roles, SemRole, TypeId};

struct Writer<'g> {
    graph: &'g LfGraph,
    assignment: &'g RoleAssignment,
    /// Side conditions on existential entities, conjoined at top level.
    extras: Vec<LogicalExpr>,
    existentials: Vec<String>,
    events: usize,
}

fn figure() -> SemRole {
    SemRole::new(roles::FIGURE).expect("static role name")
}

fn conjoin(mut parts: Vec<LogicalExpr>) -> LogicalExpr {
    if parts.len() == 1 {
        parts.remove(0)
    } else {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                LogicalExpr::And(xs) => flat.extend(xs),
                x => flat.push(x),
            }
        }
        LogicalExpr::And(flat)
    }
}

impl Writer<'_> {
    fn fresh_event(&mut self) -> String {
        self.events += 1;
        let v = if self.events == 1 {
            "ev".to_string()
        } else {
            format!("ev{}", self.events)
        };
        self.existentials.push(v.clone());
        v
    }

    fn entity_var(&mut self, id: &str) -> String {
        let v = id.to_ascii_lowercase();
        if !self.existentials.contains(&v) {
            self.existentials.push(v.clone());
        }
        v
    }

    /// Role arguments of a node, in child order.
    fn role_args(&mut self, id: &str, mut atom: Atom) -> Atom {
        for e in self.graph.children(id) {
            if let EdgeLabel::Role(role) = &e.label {
                let t = self.term(&e.to);
                atom = atom.arg(role, t);
            }
        }
        atom
    }

    fn modifiers(&mut self, id: &str, figure_var: &str) -> Vec<LogicalExpr> {
        let mut out = Vec::new();
        for e in self.graph.children(id) {
            if e.label == EdgeLabel::Mod {
                out.extend(self.modifier(&e.to, figure_var));
            }
        }
        out
    }

    fn modifier(&mut self, id: &str, figure_var: &str) -> Vec<LogicalExpr> {
        let node = self.graph.node(id);
        match node.op {
            Some(op) => {
                let mut parts = Vec::new();
                for e in self.graph.children(id) {
                    parts.extend(self.modifier(&e.to, figure_var));
                }
                match op {
                    OpKind::And => parts,
                    OpKind::Or => vec![LogicalExpr::Or(parts)],
                }
            }
            None => {
                let atom = Atom::new(node.ty.clone()).arg(&figure(), Term::Var(figure_var.to_string()));
                vec![LogicalExpr::Atom(self.role_args(id, atom))]
            }
        }
    }

    /// A node in formula position.
    fn formula(&mut self, id: &str) -> LogicalExpr {
        let node = self.graph.node(id);
        match node.indicator {
            Indicator::Operator => {
                let parts: Vec<LogicalExpr> = self.graph.children(id).iter().map(|e| self.formula(&e.to)).collect();
                match node.op {
                    Some(OpKind::Or) => LogicalExpr::Or(parts),
                    _ => LogicalExpr::And(parts),
                }
            }
            Indicator::F => {
                let has_mods = self.graph.out_edges(id).any(|e| e.label == EdgeLabel::Mod);
                let mut atom = Atom::new(node.ty.clone());
                let ev = has_mods.then(|| self.fresh_event());
                if let Some(ev) = &ev {
                    atom.id = Some(Term::Var(ev.clone()));
                }
                let atom = self.role_args(id, atom);
                let mut parts = vec![LogicalExpr::Atom(atom)];
                if let Some(ev) = ev {
                    parts.extend(self.modifiers(id, &ev));
                }
                conjoin(parts)
            }
            Indicator::Term | Indicator::Impro => match self.term(id) {
                Term::Var(v) => LogicalExpr::Var(v),
                Term::Expr(e) => *e,
                Term::Const(c) => LogicalExpr::Var(c),
            },
        }
    }

    /// A node in argument position.
    fn term(&mut self, id: &str) -> Term {
        if let Some(role) = self.assignment.role_of(id) {
            return Term::Var(role.var_name());
        }
        let node = self.graph.node(id);
        match node.indicator {
            Indicator::F => Term::Expr(Box::new(self.formula(id))),
            Indicator::Impro => Term::Var(self.entity_var(id)),
            Indicator::Term => {
                let v = self.entity_var(id);
                let mut atom = Atom::new(node.ty.clone());
                atom.id = Some(Term::Var(v.clone()));
                let atom = self.role_args(id, atom);
                self.extras.push(LogicalExpr::Atom(atom));
                let mods = self.modifiers(id, &v);
                self.extras.extend(mods);
                Term::Var(v)
            }
            Indicator::Operator => {
                let operands: Vec<String> = self.graph.children(id).iter().map(|e| e.to.clone()).collect();
                let all_events = operands.iter().all(|o| self.graph.node(o).indicator == Indicator::F);
                if all_events {
                    return Term::Expr(Box::new(self.formula(id)));
                }
                let terms: Vec<Term> = operands.iter().map(|o| self.term(o)).collect();
                if terms.windows(2).all(|w| w[0] == w[1]) {
                    return terms.into_iter().next().expect("operators have operands");
                }
                // Distinct alternatives: one entity that is any (or all) of them.
                let v = self.entity_var(id);
                let parts: Vec<LogicalExpr> = operands
                    .iter()
                    .map(|o| {
                        let mut atom = Atom::new(self.graph.node(o).ty.clone());
                        atom.id = Some(Term::Var(v.clone()));
                        LogicalExpr::Atom(atom)
                    })
                    .collect();
                self.extras.push(match node.op {
                    Some(OpKind::Or) => LogicalExpr::Or(parts),
                    _ => LogicalExpr::And(parts),
                });
                Term::Var(v)
            }
        }
    }
}

/// `[new-type :role ?role ...] => definition`, with gaps replaced by the
/// role variables and every other entity or event variable existential.
pub fn generate_axiom(graph: &LfGraph, assignment: &RoleAssignment, new_type: &TypeId) -> Result<Axiom> {
    let mut w = Writer {
        graph,
        assignment,
        extras: Vec::new(),
        existentials: Vec::new(),
        events: 0,
    };
    let main = w.formula(&graph.root);
    let mut parts = vec![main];
    parts.append(&mut w.extras);
    let axiom = Axiom {
        id: AxiomId(new_type.local_name().to_ascii_lowercase()),
        antecedent: Antecedent {
            ty: new_type.clone(),
            vars: assignment
                .bindings
                .iter()
                .map(|b| (b.target_role.clone(), b.target_role.var_name()))
                .collect(),
        },
        consequent: conjoin(parts),
        existentials: w.existentials,
    };
    axiom
        .check_closed()
        .map_err(|e| Error::invalid(format!("generated axiom {}", axiom.id), e.to_string()))?;
    Ok(axiom)
}
