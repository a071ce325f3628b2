//! Logical expressions and entailment axioms in bracketed term notation.
//!
//! Canonical (stored) form keeps role keywords:
//!
//! ```text
//! [ONT::CAUSE-EFFECT :agent ?agent :formal [ONT::DIE :affected ?affected]]
//! ```
//!
//! The abbreviated form drops them: `[ONT::CAUSE-EFFECT ?agent [ONT::DIE ?affected]]`.
//! Grammar accepted by [`parse_expr`]:
//!
//! ```text
//! expr  := '?' NAME | '[' head item* ']'
//! head  := AND | OR | NOT | ONT::BECOME | TYPE
//! item  := ':' ROLE term | term
//! term  := expr | CONSTANT
//! ```
//!
//! `:id` names the event or entity variable of an atom. `ONT::BECOME` takes
//! one state expression; leading terms before it are accepted and dropped.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SemRole, TypeId};

pub const BECOME: &str = "ONT::BECOME";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AxiomId(pub String);

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Variable name without the leading `?`.
    Var(String),
    Const(String),
    Expr(Box<LogicalExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomArg {
    pub role: Option<SemRole>,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub ty: TypeId,
    pub id: Option<Term>,
    pub args: Vec<AtomArg>,
}

impl Atom {
    pub fn new(ty: TypeId) -> Self {
        Atom {
            ty,
            id: None,
            args: Vec::new(),
        }
    }

    pub fn arg(mut self, role: &SemRole, term: Term) -> Self {
        self.args.push(AtomArg {
            role: Some(role.clone()),
            term,
        });
        self
    }

    pub fn get(&self, role: &SemRole) -> Option<&Term> {
        self.args
            .iter()
            .find(|a| a.role.as_ref() == Some(role))
            .map(|a| &a.term)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogicalExpr {
    Atom(Atom),
    And(Vec<LogicalExpr>),
    Or(Vec<LogicalExpr>),
    Not(Box<LogicalExpr>),
    /// Transition into the wrapped state.
    Become(Box<LogicalExpr>),
    /// The event bound to a variable holds.
    Var(String),
}

impl LogicalExpr {
    /// Every variable mentioned anywhere in the expression.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            LogicalExpr::Atom(a) => {
                for t in a.id.iter().chain(a.args.iter().map(|x| &x.term)) {
                    t.collect_vars(out);
                }
            }
            LogicalExpr::And(xs) | LogicalExpr::Or(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            LogicalExpr::Not(x) | LogicalExpr::Become(x) => x.collect_vars(out),
            LogicalExpr::Var(v) => {
                out.insert(v.clone());
            }
        }
    }

    /// Every atom type mentioned anywhere in the expression.
    pub fn types(&self) -> BTreeSet<TypeId> {
        let mut out = BTreeSet::new();
        self.collect_types(&mut out);
        out
    }

    fn collect_types(&self, out: &mut BTreeSet<TypeId>) {
        match self {
            LogicalExpr::Atom(a) => {
                out.insert(a.ty.clone());
                for t in a.id.iter().chain(a.args.iter().map(|x| &x.term)) {
                    if let Term::Expr(e) = t {
                        e.collect_types(out);
                    }
                }
            }
            LogicalExpr::And(xs) | LogicalExpr::Or(xs) => xs.iter().for_each(|x| x.collect_types(out)),
            LogicalExpr::Not(x) | LogicalExpr::Become(x) => x.collect_types(out),
            LogicalExpr::Var(_) => {}
        }
    }

    /// Replace variables using `bind`; unbound variables are left in place.
    pub fn substitute(&self, bind: &dyn Fn(&str) -> Option<Term>) -> LogicalExpr {
        match self {
            LogicalExpr::Atom(a) => LogicalExpr::Atom(Atom {
                ty: a.ty.clone(),
                id: a.id.as_ref().map(|t| t.substitute(bind)),
                args: a
                    .args
                    .iter()
                    .map(|x| AtomArg {
                        role: x.role.clone(),
                        term: x.term.substitute(bind),
                    })
                    .collect(),
            }),
            LogicalExpr::And(xs) => LogicalExpr::And(xs.iter().map(|x| x.substitute(bind)).collect()),
            LogicalExpr::Or(xs) => LogicalExpr::Or(xs.iter().map(|x| x.substitute(bind)).collect()),
            LogicalExpr::Not(x) => LogicalExpr::Not(Box::new(x.substitute(bind))),
            LogicalExpr::Become(x) => LogicalExpr::Become(Box::new(x.substitute(bind))),
            LogicalExpr::Var(v) => match bind(v) {
                Some(Term::Expr(e)) => *e,
                Some(Term::Var(w)) => LogicalExpr::Var(w),
                // A constant in formula position stays as the variable it replaced.
                Some(Term::Const(_)) | None => LogicalExpr::Var(v.clone()),
            },
        }
    }

    /// Abbreviated rendering without role keywords.
    pub fn abbreviated(&self) -> String {
        let mut s = String::new();
        write_expr(&mut s, self, false);
        s
    }
}

impl Term {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Expr(e) => e.collect_vars(out),
        }
    }

    fn substitute(&self, bind: &dyn Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => bind(v).unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Expr(e) => Term::Expr(Box::new(e.substitute(bind))),
        }
    }
}

fn write_term(out: &mut String, t: &Term, keywords: bool) {
    match t {
        Term::Var(v) => {
            out.push('?');
            out.push_str(v);
        }
        Term::Const(c) => out.push_str(c),
        Term::Expr(e) => write_expr(out, e, keywords),
    }
}

fn write_expr(out: &mut String, e: &LogicalExpr, keywords: bool) {
    match e {
        LogicalExpr::Atom(a) => {
            out.push('[');
            out.push_str(a.ty.as_str());
            if let Some(id) = &a.id {
                out.push(' ');
                if keywords {
                    out.push_str(":id ");
                }
                write_term(out, id, keywords);
            }
            for arg in &a.args {
                out.push(' ');
                if let (true, Some(role)) = (keywords, &arg.role) {
                    out.push(':');
                    out.push_str(&role.var_name());
                    out.push(' ');
                }
                write_term(out, &arg.term, keywords);
            }
            out.push(']');
        }
        LogicalExpr::And(xs) | LogicalExpr::Or(xs) => {
            out.push_str(if matches!(e, LogicalExpr::And(_)) { "[AND" } else { "[OR" });
            for x in xs {
                out.push(' ');
                write_expr(out, x, keywords);
            }
            out.push(']');
        }
        LogicalExpr::Not(x) => {
            out.push_str("[NOT ");
            write_expr(out, x, keywords);
            out.push(']');
        }
        LogicalExpr::Become(x) => {
            out.push('[');
            out.push_str(BECOME);
            out.push(' ');
            write_expr(out, x, keywords);
            out.push(']');
        }
        LogicalExpr::Var(v) => {
            out.push('?');
            out.push_str(v);
        }
    }
}

impl fmt::Display for LogicalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, true);
        f.write_str(&s)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, true);
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Sym(String),
}

fn tokenize(text: &str) -> Vec<Tok> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, toks: &mut Vec<Tok>| {
        if !cur.is_empty() {
            toks.push(Tok::Sym(std::mem::take(cur)));
        }
    };
    for c in text.chars() {
        match c {
            '[' | '(' => {
                flush(&mut cur, &mut toks);
                toks.push(Tok::Open);
            }
            ']' | ')' => {
                flush(&mut cur, &mut toks);
                toks.push(Tok::Close);
            }
            c if c.is_whitespace() => flush(&mut cur, &mut toks),
            c => cur.push(c),
        }
    }
    flush(&mut cur, &mut toks);
    toks
}

struct TermParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl TermParser {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::syntax("logical expression", format!("{} (at token {})", msg.into(), self.pos))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<LogicalExpr> {
        match self.next() {
            Some(Tok::Sym(s)) if s.starts_with('?') => Ok(LogicalExpr::Var(var_name(&s)?)),
            Some(Tok::Open) => self.bracket(),
            _ => Err(self.err("expected '[' or a variable")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        match self.next() {
            Some(Tok::Sym(s)) if s.starts_with('?') => Ok(Term::Var(var_name(&s)?)),
            Some(Tok::Sym(s)) if s.starts_with(':') => Err(self.err(format!("unexpected keyword {s}"))),
            Some(Tok::Sym(s)) => Ok(Term::Const(s)),
            Some(Tok::Open) => Ok(Term::Expr(Box::new(self.bracket()?))),
            _ => Err(self.err("expected a term")),
        }
    }

    fn bracket(&mut self) -> Result<LogicalExpr> {
        let head = match self.next() {
            Some(Tok::Sym(s)) => s,
            _ => return Err(self.err("expected an operator or type after '['")),
        };
        match head.to_ascii_uppercase().as_str() {
            "AND" | "OR" => {
                let mut xs = Vec::new();
                while self.peek() != Some(&Tok::Close) {
                    xs.push(self.expr()?);
                }
                self.next();
                if xs.is_empty() {
                    return Err(self.err(format!("empty {head}")));
                }
                Ok(if head.eq_ignore_ascii_case("AND") {
                    LogicalExpr::And(xs)
                } else {
                    LogicalExpr::Or(xs)
                })
            }
            "NOT" => {
                let x = self.expr()?;
                self.close()?;
                Ok(LogicalExpr::Not(Box::new(x)))
            }
            "ONT::BECOME" | "BECOME" => {
                let mut items = Vec::new();
                while self.peek() != Some(&Tok::Close) {
                    items.push(self.term()?);
                }
                self.next();
                match items.pop() {
                    Some(Term::Expr(e)) => Ok(LogicalExpr::Become(e)),
                    _ => Err(self.err("BECOME must end with a state expression")),
                }
            }
            _ => {
                let ty = TypeId::lenient(&head)?;
                let mut atom = Atom::new(ty);
                loop {
                    match self.peek() {
                        Some(Tok::Close) => {
                            self.next();
                            break;
                        }
                        Some(Tok::Sym(s)) if s.starts_with(':') => {
                            let kw = s[1..].to_string();
                            self.next();
                            let term = self.term()?;
                            if kw.eq_ignore_ascii_case("id") {
                                atom.id = Some(term);
                            } else {
                                atom.args.push(AtomArg {
                                    role: Some(SemRole::new(&kw)?),
                                    term,
                                });
                            }
                        }
                        Some(_) => {
                            let term = self.term()?;
                            atom.args.push(AtomArg { role: None, term });
                        }
                        None => return Err(self.err("unclosed '['")),
                    }
                }
                Ok(LogicalExpr::Atom(atom))
            }
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.next() {
            Some(Tok::Close) => Ok(()),
            _ => Err(self.err("expected ']'")),
        }
    }
}

fn var_name(sym: &str) -> Result<String> {
    let name = &sym[1..];
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(Error::syntax("logical expression", format!("bad variable {sym}")));
    }
    Ok(name.to_ascii_lowercase())
}

/// Parse one expression in term notation.
pub fn parse_expr(text: &str) -> Result<LogicalExpr> {
    let mut p = TermParser {
        toks: tokenize(text),
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Left-hand side of an axiom: a type applied to one variable per role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Antecedent {
    pub ty: TypeId,
    pub vars: Vec<(SemRole, String)>,
}

impl Antecedent {
    pub fn var_for(&self, role: &SemRole) -> Option<&str> {
        self.vars.iter().find(|(r, _)| r == role).map(|(_, v)| v.as_str())
    }

    fn to_expr(&self) -> LogicalExpr {
        let mut atom = Atom::new(self.ty.clone());
        for (role, var) in &self.vars {
            atom = atom.arg(role, Term::Var(var.clone()));
        }
        LogicalExpr::Atom(atom)
    }
}

impl fmt::Display for Antecedent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

/// `antecedent => consequent`, with explicitly existential variables listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AxiomRecord", into = "AxiomRecord")]
pub struct Axiom {
    pub id: AxiomId,
    pub antecedent: Antecedent,
    pub consequent: LogicalExpr,
    pub existentials: Vec<String>,
}

impl Axiom {
    /// Variables in the consequent that are neither universal nor declared existential.
    pub fn free_variables(&self) -> Vec<String> {
        self.consequent
            .variables()
            .into_iter()
            .filter(|v| self.antecedent.vars.iter().all(|(_, u)| u != v) && !self.existentials.contains(v))
            .collect()
    }

    pub fn check_closed(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (_, v) in &self.antecedent.vars {
            if !seen.insert(v) {
                return Err(Error::invalid(format!("axiom {}", self.id), format!("antecedent variable ?{v} repeated")));
            }
        }
        match self.free_variables().first() {
            Some(v) => Err(Error::invalid(format!("axiom {}", self.id), format!("free variable ?{v} in consequent"))),
            None => Ok(()),
        }
    }

    /// `[TYPE ?agent ?affected] => consequent`, role keywords dropped.
    pub fn abbreviated(&self) -> String {
        format!("{} => {}", self.antecedent.to_expr().abbreviated(), self.consequent.abbreviated())
    }
}

#[derive(Serialize, Deserialize)]
struct AxiomRecord {
    id: AxiomId,
    antecedent: String,
    consequent: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    existentials: Vec<String>,
}

impl TryFrom<AxiomRecord> for Axiom {
    type Error = Error;

    fn try_from(r: AxiomRecord) -> Result<Self> {
        let ante = match parse_expr(&r.antecedent)? {
            LogicalExpr::Atom(a) if a.id.is_none() => a,
            _ => return Err(Error::invalid(format!("axiom {}", r.id), "antecedent must be a single atom")),
        };
        let mut vars = Vec::new();
        for arg in ante.args {
            match (arg.role, arg.term) {
                (Some(role), Term::Var(v)) => vars.push((role, v)),
                _ => {
                    return Err(Error::invalid(
                        format!("axiom {}", r.id),
                        "antecedent arguments must be :role ?variable pairs",
                    ))
                }
            }
        }
        let axiom = Axiom {
            id: r.id,
            antecedent: Antecedent { ty: ante.ty, vars },
            consequent: parse_expr(&r.consequent)?,
            existentials: r.existentials.iter().map(|v| v.trim_start_matches('?').to_string()).collect(),
        };
        axiom.check_closed()?;
        Ok(axiom)
    }
}

impl From<Axiom> for AxiomRecord {
    fn from(a: Axiom) -> Self {
        AxiomRecord {
            antecedent: a.antecedent.to_string(),
            consequent: a.consequent.to_string(),
            existentials: a.existentials,
            id: a.id,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_abbreviated_and_keyword_forms() {
        let short = parse_expr("[ONT::CAUSE-EFFECT ?agent [ONT::DIE ?affected]]").unwrap();
        assert_eq!(short.abbreviated(), "[ONT::CAUSE-EFFECT ?agent [ONT::DIE ?affected]]");
        let long = parse_expr("[ONT::CAUSE-EFFECT :agent ?agent :formal [ONT::DIE :affected ?affected]]").unwrap();
        assert_eq!(long.abbreviated(), short.abbreviated());
        assert_eq!(parse_expr(&long.to_string()).unwrap(), long);
    }

    #[test]
    fn become_drops_leading_subject() {
        let e = parse_expr("[ONT::BECOME ?affected [ONT::DEAD :figure ?affected]]").unwrap();
        assert!(matches!(e, LogicalExpr::Become(_)));
        assert_eq!(e.to_string(), "[ONT::BECOME [ONT::DEAD :figure ?affected]]");
    }

    #[test]
    fn table_style_names_get_prefixed() {
        let e = parse_expr("[AND [RUB-SCRAPE-WIPE ?ev ?agent ?affected] [INTENSE ?ev]]").unwrap();
        assert_eq!(
            e.abbreviated(),
            "[AND [ONT::RUB-SCRAPE-WIPE ?ev ?agent ?affected] [ONT::INTENSE ?ev]]"
        );
    }

    #[test]
    fn free_variable_is_rejected() {
        let rec = AxiomRecord {
            id: AxiomId("a".into()),
            antecedent: "[ONT::KILL :agent ?agent]".into(),
            consequent: "[ONT::DIE :affected ?affected]".into(),
            existentials: vec![],
        };
        assert!(Axiom::try_from(rec).is_err());
    }

    #[test]
    fn unbalanced_input_is_rejected() {
        assert!(parse_expr("[ONT::DIE ?x").is_err());
        assert!(parse_expr("[ONT::DIE ?x]]").is_err());
        assert!(parse_expr("[AND]").is_err());
    }
}
