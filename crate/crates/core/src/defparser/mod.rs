//! Gloss parsing into gap-marked logical-form graphs.

mod build;
mod grammar;
mod lexer;
mod lf;
mod marks;

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;

pub use lexer::{is_closed_class, lemma_candidates, Infl, LexIndex, Reading, CLOSED_CLASS};
pub use lf::{EdgeLabel, Indicator, LfEdge, LfGraph, LfNode, Mark, NpSpan, OpKind, ParseScore, REFERENTIAL_SEM};
pub use marks::mark_surface_patterns;

use crate::corpus::GlossToken;
use crate::model::SemRole;

/// Roles expected from the mapping, used to rank competing parses.
#[derive(Clone, Debug, Default)]
pub struct ParseContext {
    pub roles: Vec<SemRole>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseFailure {
    UnknownToken(Vec<String>),
    NoParse,
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseFailure::UnknownToken(t) => write!(f, "unknown token(s): {}", t.join(", ")),
            ParseFailure::NoParse => f.write_str("no parse under the definition grammar"),
        }
    }
}

impl std::error::Error for ParseFailure {}

/// Label on the nearest non-OPERAND edge above a node.
fn governing_label<'g>(g: &'g LfGraph, id: &str) -> Option<&'g EdgeLabel> {
    let mut cur = id;
    while let Some(e) = g.in_edge(cur) {
        if e.label != EdgeLabel::Operand {
            return Some(&e.label);
        }
        cur = &e.from;
    }
    None
}

fn score(g: &LfGraph, ctx: &ParseContext) -> ParseScore {
    let context_matches = g
        .nodes
        .iter()
        .filter(|n| n.indicator == Indicator::Impro || !n.marks.is_empty())
        .filter(|n| {
            governing_label(g, &n.id)
                .and_then(EdgeLabel::role)
                .is_some_and(|r| ctx.roles.contains(r))
        })
        .count();
    ParseScore {
        tag_matches: g.nodes.iter().filter(|n| n.tag_match).count(),
        context_matches,
        impros: g.impros().count(),
    }
}

/// All analyses of one definition, best first.
///
/// Ranking: more tokens agreeing with gloss tags, then more gaps and marked
/// arguments on roles the mapping predicts, then fewer gaps, then the term
/// dump as a final tie-break. Identical analyses are reported once.
pub fn parse_definition(
    index: &LexIndex<'_>,
    gloss: &[GlossToken],
    ctx: &ParseContext,
) -> Result<Vec<LfGraph>, ParseFailure> {
    let (lexed, unknown) = index.lex(gloss);
    if !unknown.is_empty() {
        return Err(ParseFailure::UnknownToken(unknown));
    }
    if lexed.is_empty() {
        return Err(ParseFailure::NoParse);
    }
    let forms: Vec<String> = lexed.tokens.iter().map(|t| t.form.clone()).collect();
    let parser = grammar::Parser {
        lexed: &lexed,
        resource: index.resource,
    };
    let mut seen = BTreeSet::new();
    let mut graphs: Vec<(String, LfGraph)> = Vec::new();
    for tree in parser.definitions() {
        let g = build::Builder::new(&lexed, index.resource).build(&tree);
        let mut g = mark_surface_patterns(g, &forms);
        g.score = score(&g, ctx);
        let dump = g.term_dump();
        if seen.insert(dump.clone()) {
            graphs.push((dump, g));
        }
    }
    if graphs.is_empty() {
        return Err(ParseFailure::NoParse);
    }
    graphs.sort_by(|(da, a), (db, b)| {
        let key = |g: &LfGraph| {
            (
                Reverse(g.score.tag_matches),
                Reverse(g.score.context_matches),
                g.score.impros,
            )
        };
        key(a).cmp(&key(b)).then_with(|| da.cmp(db))
    });
    Ok(graphs.into_iter().map(|(_, g)| g).collect())
}
