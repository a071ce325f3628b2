use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::model::{SemRole, TypeId};

pub const REFERENTIAL_SEM: &str = "ONT::REFERENTIAL-SEM";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Indicator {
    F,
    Impro,
    Term,
    Operator,
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Indicator::F => "F",
            Indicator::Impro => "IMPRO",
            Indicator::Term => "TERM",
            Indicator::Operator => "OPERATOR",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Mark {
    Parenthetical,
    IndefPronoun,
    IndefNoun,
    CertainMarked,
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Parenthetical => "PARENTHETICAL",
            Mark::IndefPronoun => "INDEF-PRONOUN",
            Mark::IndefNoun => "INDEF-NOUN",
            Mark::CertainMarked => "CERTAIN-MARKED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OpKind {
    And,
    Or,
}

/// Where a noun phrase sits in the gloss; used for surface-pattern marks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NpSpan {
    pub start: usize,
    pub end: usize,
    pub det: Option<String>,
    pub certain: bool,
    pub argument: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LfNode {
    pub id: String,
    pub indicator: Indicator,
    #[serde(rename = "type")]
    pub ty: TypeId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "BTreeSet::is_empty")]
    pub marks: BTreeSet<Mark>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<OpKind>,
    /// Token range `[start, end)` of the word realizing the node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<(usize, usize)>,
    #[serde(skip)]
    pub np: Option<NpSpan>,
    /// The chosen sense agrees with the gloss tag on this token.
    #[serde(skip)]
    pub tag_match: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Role(SemRole),
    Mod,
    Operand,
}

impl Serialize for EdgeLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl EdgeLabel {
    pub fn role(&self) -> Option<&SemRole> {
        match self {
            EdgeLabel::Role(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Role(r) => write!(f, "{r}"),
            EdgeLabel::Mod => f.write_str("MOD"),
            EdgeLabel::Operand => f.write_str("OPERAND"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LfEdge {
    pub from: String,
    pub to: String,
    pub label: EdgeLabel,
}

/// Rank score; compared lexicographically (higher first, then fewer IMPROs).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParseScore {
    pub tag_matches: usize,
    pub context_matches: usize,
    pub impros: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LfGraph {
    pub nodes: Vec<LfNode>,
    pub edges: Vec<LfEdge>,
    pub root: String,
    pub score: ParseScore,
}

fn id_number(id: &str) -> usize {
    id.trim_start_matches('X').parse().unwrap_or(usize::MAX)
}

impl LfGraph {
    pub fn node(&self, id: &str) -> &LfNode {
        self.nodes.iter().find(|n| n.id == id).expect("edge endpoints exist")
    }

    pub fn root_node(&self) -> &LfNode {
        self.node(&self.root)
    }

    pub fn out_edges<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a LfEdge> + 'a {
        self.edges.iter().filter(move |e| e.from == id)
    }

    /// Outgoing edges ordered by target node number.
    pub fn children<'a>(&'a self, id: &'a str) -> Vec<&'a LfEdge> {
        let mut v: Vec<&LfEdge> = self.out_edges(id).collect();
        v.sort_by_key(|e| id_number(&e.to));
        v
    }

    /// The single incoming edge (graphs are trees), if any.
    pub fn in_edge(&self, id: &str) -> Option<&LfEdge> {
        self.edges.iter().find(|e| e.to == id)
    }

    /// Edges from the root down to `id`, root-side first.
    pub fn path_to(&self, id: &str) -> Vec<&LfEdge> {
        let mut path = Vec::new();
        let mut cur = id;
        while let Some(e) = self.in_edge(cur) {
            path.push(e);
            cur = &e.from;
        }
        path.reverse();
        path
    }

    pub fn impros(&self) -> impl Iterator<Item = &LfNode> {
        self.nodes.iter().filter(|n| n.indicator == Indicator::Impro)
    }

    /// Term-notation dump, root first then by node id:
    /// `(F X2 ONT::CAUSE-EFFECT :AGENT X1 :FORMAL X4 :LEX cause)`.
    pub fn term_dump(&self) -> String {
        let mut order: Vec<&LfNode> = self.nodes.iter().collect();
        order.sort_by_key(|n| (n.id != self.root, id_number(&n.id)));
        let mut out = String::new();
        for n in order {
            out.push('(');
            out.push_str(&format!("{} {} {}", n.indicator, n.id, n.ty));
            let mut edges: Vec<&LfEdge> = self.out_edges(&n.id).collect();
            edges.sort_by_key(|e| id_number(&e.to));
            for e in edges {
                out.push_str(&format!(" :{} {}", e.label, e.to));
            }
            if let Some(w) = &n.word {
                out.push_str(&format!(" :LEX {w}"));
            }
            if !n.marks.is_empty() {
                let marks: Vec<String> = n.marks.iter().map(Mark::to_string).collect();
                out.push_str(&format!(" :MARKS ({})", marks.join(" ")));
            }
            out.push_str(")\n");
        }
        out
    }
}

impl fmt::Display for LfGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.term_dump())
    }
}
