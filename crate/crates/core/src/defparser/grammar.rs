//! Controlled definition grammar.
//!
//! Every function returns all analyses starting at a token position as
//! `(tree, next position)` pairs. Gap rules, each naming the position it
//! leaves empty:
//!
//! | rule | shape | gap |
//! |------|-------|-----|
//! | G1  | `[to] VP` as a whole definition | subject of every top-level conjunct |
//! | G2  | `V _` with an NP object slot | direct object |
//! | G3  | `V _` with a second NP slot | indirect object |
//! | G4  | `V P _` with a PP complement slot | ground of the preposition |
//! | G5  | `V _ to VP` (complement without a controller) | embedded subject |
//! | G6  | `V _ ADJ` (small clause) | figure of the adjective |
//! | G7  | `ADJ-er than _` | comparison standard |
//! | G8  | `N of _` | figure of the noun |
//! | G9  | `VP or/and VP` under G1 | each conjunct's subject, coindexed later |
//! | G10 | `V to VP` (subject control) | controlled subject, no edge |
//! | G11 | `V ADJ` (predicative) | controlled subject, no edge |
//! | G12 | `V P VP-ing` (controlled gerund) | controlled subject, no edge |
//!
//! Coordination is supported for VPs, NPs and adverbs; right-node raising
//! is not.

use crate::model::{LinkingTemplate, PhraseCat, Pos, Resource, SemRole, Slot};

use super::lexer::{Infl, Lexed, Reading};
use super::lf::OpKind;

#[derive(Clone, Debug)]
pub enum Coord<T> {
    Single(T),
    Multi { conj: usize, op: OpKind, items: Vec<T> },
}

#[derive(Clone, Debug)]
pub enum Np {
    Gap {
        at: usize,
    },
    Pronoun {
        idx: usize,
    },
    Noun {
        head: usize,
        start: usize,
        end: usize,
        det: Option<usize>,
        certain: bool,
        /// Adjectives and compound nouns before the head.
        pre: Vec<usize>,
        figure: Option<Box<Np>>,
    },
    Coord {
        conj: usize,
        op: OpKind,
        items: Vec<Np>,
    },
}

#[derive(Clone, Debug)]
pub enum Mod {
    Adv(Coord<Reading>),
    Pp { prep: Reading, ground: Np },
}

#[derive(Clone, Debug)]
pub enum Subj {
    Gap { at: usize },
    Given(Np),
    Controlled,
}

#[derive(Clone, Debug)]
pub struct Adjp {
    pub adj: Reading,
    pub figure: Option<Np>,
    pub compar: Option<Np>,
}

#[derive(Clone, Debug)]
pub enum Comp {
    Np(Np),
    Pp { prep: Option<Reading>, ground: Np },
    PpVp { prep: Option<Reading>, vp: Box<Vp> },
    Adjp(Adjp),
    Vp(Box<Coord<Vp>>),
}

#[derive(Clone, Debug)]
pub struct Vp {
    pub verb: Reading,
    pub subj_role: SemRole,
    pub subj: Subj,
    pub comps: Vec<(SemRole, Comp)>,
    pub mods: Vec<Mod>,
}

#[derive(Clone, Copy, Debug)]
enum SubjMode {
    Gap,
    Controlled,
}

const MAX_CONJUNCTS: usize = 4;

pub struct Parser<'a> {
    pub lexed: &'a Lexed,
    pub resource: &'a Resource,
}

impl<'a> Parser<'a> {
    fn form(&self, i: usize) -> Option<&str> {
        self.lexed.form(i)
    }

    fn is(&self, i: usize, word: &str) -> bool {
        self.form(i) == Some(word)
    }

    fn conj(&self, i: usize) -> Option<OpKind> {
        match self.form(i)? {
            "or" => Some(OpKind::Or),
            "and" => Some(OpKind::And),
            _ => None,
        }
    }

    /// All complete analyses of the definition.
    pub fn definitions(&self) -> Vec<Coord<Vp>> {
        let n = self.lexed.len();
        let mut starts = vec![0];
        if self.is(0, "to") {
            starts.push(1);
        }
        let mut out = Vec::new();
        for s in starts {
            for (vp, end) in self.vpc(s, SubjMode::Gap) {
                if end == n {
                    out.push(vp);
                }
            }
        }
        out
    }

    /// `item ((, | or | and) item)*`, ending in a conjunction when longer than one.
    fn coordinated<T: Clone>(&self, i: usize, item: &dyn Fn(usize) -> Vec<(T, usize)>) -> Vec<(Coord<T>, usize)> {
        let mut out = Vec::new();
        // (items so far, conjunction that closed the list if the last separator was one, end)
        let mut partial: Vec<(Vec<T>, Option<(usize, OpKind)>, usize)> =
            item(i).into_iter().map(|(t, j)| (vec![t], None, j)).collect();
        while let Some((items, closing, j)) = partial.pop() {
            match (items.len(), closing) {
                (1, _) => out.push((Coord::Single(items[0].clone()), j)),
                (_, Some((conj, op))) => out.push((
                    Coord::Multi {
                        conj,
                        op,
                        items: items.clone(),
                    },
                    j,
                )),
                _ => {}
            }
            if items.len() >= MAX_CONJUNCTS {
                continue;
            }
            let closing = match self.form(j) {
                Some(",") => None,
                _ => match self.conj(j) {
                    Some(op) => Some((j, op)),
                    None => continue,
                },
            };
            for (t, k) in item(j + 1) {
                let mut more = items.clone();
                more.push(t);
                partial.push((more, closing, k));
            }
        }
        out
    }

    fn vpc(&self, i: usize, mode: SubjMode) -> Vec<(Coord<Vp>, usize)> {
        self.coordinated(i, &|j| self.vp(j, mode, false))
    }

    fn vp(&self, i: usize, mode: SubjMode, gerund: bool) -> Vec<(Vp, usize)> {
        let mut out = Vec::new();
        for verb in self.lexed.at(i, Pos::V) {
            if gerund != (verb.infl == Infl::Ing) {
                continue;
            }
            for name in &verb.templates {
                let Ok(template) = self.resource.template(name) else { continue };
                let Some(subject) = template.subject() else { continue };
                let subj = match mode {
                    SubjMode::Gap => Subj::Gap { at: i },
                    SubjMode::Controlled => Subj::Controlled,
                };
                for (comps, j) in self.complements(template, verb.end()) {
                    for (mods, k) in self.modifiers(j) {
                        out.push((
                            Vp {
                                verb: verb.clone(),
                                subj_role: subject.role.clone(),
                                subj: subj.clone(),
                                comps: comps.clone(),
                                mods,
                            },
                            k,
                        ));
                    }
                }
            }
        }
        out
    }

    /// VP whose subject is an overt or gapped NP before `to` (G5).
    fn vp_with_subject(&self, i: usize, subject: &Np) -> Vec<(Vp, usize)> {
        self.vp(i, SubjMode::Controlled, false)
            .into_iter()
            .map(|(mut vp, j)| {
                vp.subj = Subj::Given(subject.clone());
                (vp, j)
            })
            .collect()
    }

    fn complements(&self, template: &LinkingTemplate, i: usize) -> Vec<(Vec<(SemRole, Comp)>, usize)> {
        let slots: Vec<&Slot> = template.complements().collect();
        let mut acc: Vec<(Vec<(SemRole, Comp)>, usize)> = vec![(Vec::new(), i)];
        for slot in slots {
            let mut next = Vec::new();
            for (done, j) in acc {
                for (comp, k) in self.complement(slot, j) {
                    let mut d = done.clone();
                    d.push((slot.role.clone(), comp));
                    next.push((d, k));
                }
            }
            acc = next;
        }
        acc
    }

    fn complement(&self, slot: &Slot, i: usize) -> Vec<(Comp, usize)> {
        let c = &slot.constraint;
        match c.cat {
            PhraseCat::Np => self.np_arg(i).into_iter().map(|(np, j)| (Comp::Np(np), j)).collect(),
            PhraseCat::Pp => {
                let Some(form) = self.form(i) else { return Vec::new() };
                if !c.ptype.is_empty() && !c.ptype.iter().any(|p| p == form) {
                    return Vec::new();
                }
                let preps: Vec<Option<Reading>> = {
                    let r: Vec<Option<Reading>> = self.lexed.at(i, Pos::P).cloned().map(Some).collect();
                    if r.is_empty() && !c.ptype.is_empty() {
                        // Case-marking preposition with no meaning of its own.
                        vec![None]
                    } else {
                        r
                    }
                };
                let mut out = Vec::new();
                for prep in preps {
                    if c.subj.is_some() {
                        for (vp, j) in self.vp(i + 1, SubjMode::Controlled, true) {
                            out.push((
                                Comp::PpVp {
                                    prep: prep.clone(),
                                    vp: Box::new(vp),
                                },
                                j,
                            ));
                        }
                    } else {
                        for (np, j) in self.np_arg(i + 1) {
                            out.push((
                                Comp::Pp {
                                    prep: prep.clone(),
                                    ground: np,
                                },
                                j,
                            ));
                        }
                    }
                }
                out
            }
            PhraseCat::Cp => {
                let mut out = Vec::new();
                if c.subj.is_some() {
                    if self.is(i, "to") {
                        for (vp, j) in self.vpc(i + 1, SubjMode::Controlled) {
                            out.push((Comp::Vp(Box::new(vp)), j));
                        }
                    }
                } else {
                    for (np, j) in self.np_arg(i) {
                        if self.is(j, "to") {
                            for (vp, k) in self.vp_with_subject(j + 1, &np) {
                                out.push((Comp::Vp(Box::new(Coord::Single(vp))), k));
                            }
                        }
                    }
                }
                out
            }
            PhraseCat::Adjp => {
                let mut out = Vec::new();
                if c.subj.is_some() {
                    for (a, j) in self.adjp(i) {
                        out.push((Comp::Adjp(a), j));
                    }
                } else {
                    for (np, j) in self.np_arg(i) {
                        for (mut a, k) in self.adjp(j) {
                            a.figure = Some(np.clone());
                            out.push((Comp::Adjp(a), k));
                        }
                    }
                }
                out
            }
        }
    }

    fn adjp(&self, i: usize) -> Vec<(Adjp, usize)> {
        let mut out = Vec::new();
        for adj in self.lexed.at(i, Pos::Adj) {
            out.push((
                Adjp {
                    adj: adj.clone(),
                    figure: None,
                    compar: None,
                },
                adj.end(),
            ));
            if adj.infl == Infl::Comparative && self.is(adj.end(), "than") {
                for (np, j) in self.np_arg(adj.end() + 1) {
                    out.push((
                        Adjp {
                            adj: adj.clone(),
                            figure: None,
                            compar: Some(np),
                        },
                        j,
                    ));
                }
            }
        }
        out
    }

    /// An argument NP: overt, or a gap that consumes nothing.
    fn np_arg(&self, i: usize) -> Vec<(Np, usize)> {
        let mut out = vec![(Np::Gap { at: i }, i)];
        out.extend(self.np(i));
        out
    }

    fn np(&self, i: usize) -> Vec<(Np, usize)> {
        self.coordinated(i, &|j| self.np_simple(j))
            .into_iter()
            .map(|(c, j)| match c {
                Coord::Single(np) => (np, j),
                Coord::Multi { conj, op, items } => (Np::Coord { conj, op, items }, j),
            })
            .collect()
    }

    fn np_simple(&self, i: usize) -> Vec<(Np, usize)> {
        let Some(form) = self.form(i) else { return Vec::new() };
        let mut out = Vec::new();
        if form == "(" {
            for (np, j) in self.np(i + 1) {
                if self.is(j, ")") {
                    out.push((np, j + 1));
                }
            }
            return out;
        }
        if matches!(form, "something" | "somebody" | "someone" | "oneself") {
            return vec![(Np::Pronoun { idx: i }, i + 1)];
        }
        let mut j = i;
        let det = matches!(form, "a" | "an" | "the").then_some(i);
        if det.is_some() {
            j += 1;
        }
        let certain = matches!(self.form(j), Some("certain" | "particular"));
        if certain {
            j += 1;
        }
        // Pre-head words: each must be readable as an adjective or a noun;
        // any noun in the run may be the head.
        let mut k = j;
        while k < self.lexed.len() {
            let adj = self.lexed.at(k, Pos::Adj).any(|r| r.len == 1);
            let noun = self.lexed.at(k, Pos::N).any(|r| r.len == 1);
            if noun {
                let base = Np::Noun {
                    head: k,
                    start: i,
                    end: k + 1,
                    det,
                    certain,
                    pre: (j..k).collect(),
                    figure: None,
                };
                out.push((base.clone(), k + 1));
                if self.is(k + 1, "of") {
                    for (fig, e) in self.np_arg(k + 2) {
                        let mut np = base.clone();
                        if let Np::Noun { figure, .. } = &mut np {
                            *figure = Some(Box::new(fig));
                        }
                        out.push((np, e));
                    }
                }
            }
            if !(adj || noun) {
                break;
            }
            k += 1;
        }
        out
    }

    fn modifiers(&self, i: usize) -> Vec<(Vec<Mod>, usize)> {
        let mut out = vec![(Vec::new(), i)];
        let mut frontier = vec![(Vec::new(), i)];
        while let Some((mods, j)) = frontier.pop() {
            for (m, k) in self.modifier(j) {
                let mut more: Vec<Mod> = mods.clone();
                more.push(m);
                out.push((more.clone(), k));
                frontier.push((more, k));
            }
        }
        out
    }

    fn modifier(&self, i: usize) -> Vec<(Mod, usize)> {
        let mut out: Vec<(Mod, usize)> = self
            .coordinated(i, &|j| self.lexed.at(j, Pos::Adv).map(|r| (r.clone(), r.end())).collect())
            .into_iter()
            .map(|(c, j)| (Mod::Adv(c), j))
            .collect();
        for prep in self.lexed.at(i, Pos::P) {
            for (np, j) in self.np(prep.end()) {
                out.push((
                    Mod::Pp {
                        prep: prep.clone(),
                        ground: np,
                    },
                    j,
                ));
            }
        }
        out
    }
}
