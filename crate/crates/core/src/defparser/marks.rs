use super::lf::{Indicator, LfGraph, Mark};

/// Mark argument nodes realized by indefinite pronouns, parentheses, bare
/// nouns, or "a certain/particular N". `forms` are the gloss tokens the
/// graph's spans index into.
pub fn mark_surface_patterns(mut graph: LfGraph, forms: &[String]) -> LfGraph {
    for node in &mut graph.nodes {
        let Some(np) = &node.np else { continue };
        let word = node.word.as_deref().unwrap_or("");
        let pronoun = matches!(word, "something" | "somebody" | "someone" | "oneself");
        if matches!(word, "something" | "somebody" | "someone") {
            node.marks.insert(Mark::IndefPronoun);
        }
        let before = np.start.checked_sub(1).and_then(|i| forms.get(i)).map(String::as_str);
        let after = forms.get(np.end).map(String::as_str);
        if before == Some("(") && after == Some(")") {
            node.marks.insert(Mark::Parenthetical);
        }
        if np.certain {
            node.marks.insert(Mark::CertainMarked);
        }
        if np.argument && np.det.is_none() && !np.certain && !pronoun && node.indicator == Indicator::Term {
            node.marks.insert(Mark::IndefNoun);
        }
    }
    graph
}
