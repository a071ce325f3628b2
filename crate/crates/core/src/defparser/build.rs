//! Syntax tree to logical-form graph.
//!
//! Node ids follow surface order: a gap sorts just before the token it
//! precedes, a word at its own token.

use std::collections::BTreeSet;

use crate::model::{roles, Pos, Preference, Resource, SemRole, TypeId};

use super::grammar::{Comp, Coord, Mod, Np, Subj, Vp};
use super::lexer::{Lexed, Reading};
use super::lf::{EdgeLabel, Indicator, LfEdge, LfGraph, LfNode, NpSpan, OpKind, ParseScore, REFERENTIAL_SEM};

type Key = (usize, u8, usize);

struct Draft {
    key: Key,
    indicator: Indicator,
    ty: TypeId,
    word: Option<String>,
    op: Option<OpKind>,
    span: Option<(usize, usize)>,
    np: Option<NpSpan>,
    tag_match: bool,
}

pub struct Builder<'a> {
    lexed: &'a Lexed,
    resource: &'a Resource,
    nodes: Vec<Draft>,
    edges: Vec<(usize, usize, EdgeLabel)>,
    seq: usize,
}

fn role(name: &str) -> SemRole {
    SemRole::new(name).expect("well-formed role name")
}

fn op_type(op: OpKind) -> TypeId {
    TypeId::new(match op {
        OpKind::And => "ONT::AND",
        OpKind::Or => "ONT::OR",
    })
    .expect("well-formed type id")
}

impl<'a> Builder<'a> {
    pub fn new(lexed: &'a Lexed, resource: &'a Resource) -> Self {
        Builder {
            lexed,
            resource,
            nodes: Vec::new(),
            edges: Vec::new(),
            seq: 0,
        }
    }

    pub fn build(mut self, tree: &Coord<Vp>) -> LfGraph {
        let root = self.vpc(tree);
        self.finish(root)
    }

    fn add(&mut self, d: Draft) -> usize {
        self.nodes.push(d);
        self.nodes.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize, label: EdgeLabel) {
        self.edges.push((from, to, label));
    }

    fn word_node(&mut self, r: &Reading, indicator: Indicator) -> usize {
        self.add(Draft {
            key: (r.start, 1, 0),
            indicator,
            ty: r.ty.clone(),
            word: Some(r.lemma.clone()),
            op: None,
            span: Some((r.start, r.end())),
            np: None,
            tag_match: r.tag_match,
        })
    }

    fn op_node(&mut self, conj: usize, op: OpKind) -> usize {
        self.add(Draft {
            key: (conj, 1, 0),
            indicator: Indicator::Operator,
            ty: op_type(op),
            word: None,
            op: Some(op),
            span: Some((conj, conj + 1)),
            np: None,
            tag_match: false,
        })
    }

    fn gap(&mut self, at: usize) -> usize {
        self.seq += 1;
        self.add(Draft {
            key: (at, 0, self.seq),
            indicator: Indicator::Impro,
            ty: TypeId::new(REFERENTIAL_SEM).expect("well-formed type id"),
            word: None,
            op: None,
            span: None,
            np: None,
            tag_match: false,
        })
    }

    fn pref(&self, ty: &TypeId, r: &SemRole) -> Option<Preference> {
        self.resource.role_spec(ty, r).ok().flatten().map(|s| s.preference)
    }

    fn vpc(&mut self, c: &Coord<Vp>) -> usize {
        match c {
            Coord::Single(vp) => self.vp(vp),
            Coord::Multi { conj, op, items } => {
                let o = self.op_node(*conj, *op);
                for vp in items {
                    let n = self.vp(vp);
                    self.edge(o, n, EdgeLabel::Operand);
                }
                o
            }
        }
    }

    fn vp(&mut self, vp: &Vp) -> usize {
        let v = self.word_node(&vp.verb, Indicator::F);
        let vty = vp.verb.ty.clone();
        match &vp.subj {
            Subj::Gap { at } => {
                let g = self.gap(*at);
                self.edge(v, g, EdgeLabel::Role(vp.subj_role.clone()));
            }
            Subj::Given(np) => {
                let pref = self.pref(&vty, &vp.subj_role);
                let n = self.np(np, pref.as_ref(), true);
                self.edge(v, n, EdgeLabel::Role(vp.subj_role.clone()));
            }
            Subj::Controlled => {}
        }
        for (r, comp) in &vp.comps {
            let label = EdgeLabel::Role(r.clone());
            match comp {
                Comp::Np(np) => {
                    let pref = self.pref(&vty, r);
                    let n = self.np(np, pref.as_ref(), true);
                    self.edge(v, n, label);
                }
                Comp::Pp { prep: Some(p), ground } => {
                    let pn = self.word_node(p, Indicator::F);
                    self.edge(v, pn, label);
                    let pref = self.pref(&p.ty, &role(roles::GROUND));
                    let g = self.np(ground, pref.as_ref(), true);
                    self.edge(pn, g, EdgeLabel::Role(role(roles::GROUND)));
                }
                Comp::Pp { prep: None, ground } => {
                    let pref = self.pref(&vty, r);
                    let g = self.np(ground, pref.as_ref(), true);
                    self.edge(v, g, label);
                }
                Comp::PpVp { prep, vp: inner } => {
                    let i = self.vp(inner);
                    match prep {
                        Some(p) => {
                            let pn = self.word_node(p, Indicator::F);
                            self.edge(v, pn, label);
                            self.edge(pn, i, EdgeLabel::Role(role(roles::GROUND)));
                        }
                        None => self.edge(v, i, label),
                    }
                }
                Comp::Adjp(a) => {
                    let an = self.word_node(&a.adj, Indicator::F);
                    self.edge(v, an, label);
                    if let Some(fig) = &a.figure {
                        let pref = self.pref(&a.adj.ty, &role(roles::FIGURE));
                        let n = self.np(fig, pref.as_ref(), true);
                        self.edge(an, n, EdgeLabel::Role(role(roles::FIGURE)));
                    }
                    if let Some(std) = &a.compar {
                        let pref = self.pref(&a.adj.ty, &role(roles::COMPAR));
                        let n = self.np(std, pref.as_ref(), true);
                        self.edge(an, n, EdgeLabel::Role(role(roles::COMPAR)));
                    }
                }
                Comp::Vp(c) => {
                    let i = self.vpc(c);
                    self.edge(v, i, label);
                }
            }
        }
        self.mods(v, &vp.mods);
        v
    }

    fn mods(&mut self, head: usize, mods: &[Mod]) {
        for m in mods {
            match m {
                Mod::Adv(Coord::Single(r)) => {
                    let n = self.word_node(r, Indicator::F);
                    self.edge(head, n, EdgeLabel::Mod);
                }
                Mod::Adv(Coord::Multi { conj, op, items }) => {
                    let o = self.op_node(*conj, *op);
                    self.edge(head, o, EdgeLabel::Mod);
                    for r in items {
                        let n = self.word_node(r, Indicator::F);
                        self.edge(o, n, EdgeLabel::Operand);
                    }
                }
                Mod::Pp { prep, ground } => {
                    let pn = self.word_node(prep, Indicator::F);
                    self.edge(head, pn, EdgeLabel::Mod);
                    let pref = self.pref(&prep.ty, &role(roles::GROUND));
                    let g = self.np(ground, pref.as_ref(), false);
                    self.edge(pn, g, EdgeLabel::Role(role(roles::GROUND)));
                }
            }
        }
    }

    /// Noun sense choice: gloss tag, then fit with the governing preference,
    /// then the shallowest type, then the type name.
    fn choose(&self, i: usize, pos: Pos, pref: Option<&Preference>) -> Option<Reading> {
        self.lexed
            .at(i, pos)
            .filter(|r| r.len == 1)
            .min_by_key(|r| {
                let fits = pref.is_none_or(|p| {
                    self.resource
                        .preferences_compatible(p, &Preference::Type(r.ty.clone()))
                        .unwrap_or(false)
                });
                let depth = self.resource.depth(&r.ty).unwrap_or(usize::MAX);
                (!r.tag_match, !fits, depth, r.ty.clone())
            })
            .cloned()
    }

    fn np(&mut self, np: &Np, pref: Option<&Preference>, argument: bool) -> usize {
        match np {
            Np::Gap { at } => self.gap(*at),
            Np::Pronoun { idx } => self.add(Draft {
                key: (*idx, 1, 0),
                indicator: Indicator::Term,
                ty: TypeId::new(REFERENTIAL_SEM).expect("well-formed type id"),
                word: self.lexed.form(*idx).map(str::to_string),
                op: None,
                span: Some((*idx, idx + 1)),
                np: Some(NpSpan {
                    start: *idx,
                    end: idx + 1,
                    det: None,
                    certain: false,
                    argument,
                }),
                tag_match: false,
            }),
            Np::Noun {
                head,
                start,
                end,
                det,
                certain,
                pre,
                figure,
            } => {
                let r = self.choose(*head, Pos::N, pref).expect("grammar checked a noun reading");
                let h = self.word_node(&r, Indicator::Term);
                self.nodes[h].np = Some(NpSpan {
                    start: *start,
                    end: *end,
                    det: det.and_then(|d| self.lexed.form(d)).map(str::to_string),
                    certain: *certain,
                    argument,
                });
                for &p in pre {
                    let m = self
                        .choose(p, Pos::Adj, None)
                        .or_else(|| self.choose(p, Pos::N, None))
                        .expect("grammar checked a modifier reading");
                    let indicator = if m.pos == Pos::N { Indicator::Term } else { Indicator::F };
                    let mn = self.word_node(&m, indicator);
                    self.edge(h, mn, EdgeLabel::Mod);
                }
                if let Some(fig) = figure {
                    let fpref = self.pref(&r.ty, &role(roles::FIGURE));
                    let f = self.np(fig, fpref.as_ref(), true);
                    self.edge(h, f, EdgeLabel::Role(role(roles::FIGURE)));
                }
                h
            }
            Np::Coord { conj, op, items } => {
                let o = self.op_node(*conj, *op);
                for item in items {
                    let n = self.np(item, pref, argument);
                    self.edge(o, n, EdgeLabel::Operand);
                }
                o
            }
        }
    }

    fn finish(self, root: usize) -> LfGraph {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by_key(|&i| self.nodes[i].key);
        let mut ids = vec![String::new(); self.nodes.len()];
        for (n, &i) in order.iter().enumerate() {
            ids[i] = format!("X{}", n + 1);
        }
        let nodes = order
            .iter()
            .map(|&i| {
                let d = &self.nodes[i];
                LfNode {
                    id: ids[i].clone(),
                    indicator: d.indicator,
                    ty: d.ty.clone(),
                    word: d.word.clone(),
                    marks: BTreeSet::new(),
                    op: d.op,
                    span: d.span,
                    np: d.np.clone(),
                    tag_match: d.tag_match,
                }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|(f, t, l)| LfEdge {
                from: ids[*f].clone(),
                to: ids[*t].clone(),
                label: l.clone(),
            })
            .collect();
        LfGraph {
            nodes,
            edges,
            root: ids[root].clone(),
            score: ParseScore::default(),
        }
    }
}
