use std::collections::{BTreeSet, HashMap};

use crate::corpus::GlossToken;
use crate::model::{Pos, Resource, SenseKey, TypeId};

/// Function words the grammar handles itself. They never trigger an
/// unknown-token failure.
pub const CLOSED_CLASS: &[&str] = &[
    "to", "of", "than", "or", "and", "a", "an", "the", "certain", "particular", "something", "somebody", "someone",
    "oneself", "somewhere", "(", ")", ",",
];

pub fn is_closed_class(form: &str) -> bool {
    CLOSED_CLASS.contains(&form)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Infl {
    Base,
    Plural,
    Past,
    Ing,
    Comparative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub form: String,
    pub tag: Option<SenseKey>,
    pub tag_types: Vec<TypeId>,
}

/// One way of reading the tokens `start..start+len` as a lexical item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reading {
    pub start: usize,
    pub len: usize,
    pub lemma: String,
    pub pos: Pos,
    pub ty: TypeId,
    pub templates: Vec<String>,
    pub infl: Infl,
    pub tag_match: bool,
}

impl Reading {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

#[derive(Clone, Debug)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    /// Readings indexed by start token.
    pub readings: Vec<Vec<Reading>>,
}

impl Lexed {
    pub fn form(&self, i: usize) -> Option<&str> {
        self.tokens.get(i).map(|t| t.form.as_str())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn at(&self, i: usize, pos: Pos) -> impl Iterator<Item = &Reading> {
        self.readings.get(i).into_iter().flatten().filter(move |r| r.pos == pos)
    }
}

/// Candidate lemmas for an inflected form.
pub fn lemma_candidates(form: &str) -> Vec<(String, Infl)> {
    let mut out = vec![(form.to_string(), Infl::Base)];
    let mut add = |stem: &str, suffix: &str, infl: Infl| {
        if stem.len() >= 2 {
            out.push((format!("{stem}{suffix}"), infl));
        }
    };
    let undouble = |stem: &str| -> Option<String> {
        let b = stem.as_bytes();
        (b.len() >= 3 && b[b.len() - 1] == b[b.len() - 2] && !b"aeiou".contains(&b[b.len() - 1]))
            .then(|| stem[..stem.len() - 1].to_string())
    };
    if let Some(s) = form.strip_suffix("ies") {
        add(s, "y", Infl::Plural);
    }
    if let Some(s) = form.strip_suffix("es") {
        add(s, "", Infl::Plural);
    }
    if let Some(s) = form.strip_suffix('s').filter(|s| !s.ends_with('s')) {
        add(s, "", Infl::Plural);
    }
    if let Some(s) = form.strip_suffix("ied") {
        add(s, "y", Infl::Past);
    }
    if let Some(s) = form.strip_suffix("ed") {
        add(s, "", Infl::Past);
        add(s, "e", Infl::Past);
        if let Some(u) = undouble(s) {
            add(&u, "", Infl::Past);
        }
    }
    if let Some(s) = form.strip_suffix("ing") {
        add(s, "", Infl::Ing);
        add(s, "e", Infl::Ing);
        if let Some(u) = undouble(s) {
            add(&u, "", Infl::Ing);
        }
    }
    if let Some(s) = form.strip_suffix("ier") {
        add(s, "y", Infl::Comparative);
    }
    if let Some(s) = form.strip_suffix("er") {
        add(s, "", Infl::Comparative);
        add(s, "e", Infl::Comparative);
        if let Some(u) = undouble(s) {
            add(&u, "", Infl::Comparative);
        }
    }
    out.dedup();
    out
}

fn infl_allows(infl: Infl, pos: Pos) -> bool {
    match infl {
        Infl::Base => true,
        Infl::Plural => pos == Pos::N,
        Infl::Past | Infl::Ing => pos == Pos::V,
        Infl::Comparative => pos == Pos::Adj,
    }
}

/// Per-snapshot lookup tables shared by every parse.
pub struct LexIndex<'r> {
    pub resource: &'r Resource,
    sense_types: HashMap<&'r SenseKey, Vec<&'r TypeId>>,
    /// Prepositions that templates name as case markers.
    markers: BTreeSet<&'r str>,
}

impl<'r> LexIndex<'r> {
    pub fn new(resource: &'r Resource) -> Self {
        let mut sense_types: HashMap<&SenseKey, Vec<&TypeId>> = HashMap::new();
        for t in resource.ontology.values() {
            for k in &t.synsets {
                sense_types.entry(k).or_default().push(&t.id);
            }
        }
        let markers = resource
            .templates
            .values()
            .flat_map(|t| t.slots.iter().flat_map(|s| s.constraint.ptype.iter().map(String::as_str)))
            .collect();
        LexIndex {
            resource,
            sense_types,
            markers,
        }
    }

    /// Types whose source synsets include `key`.
    pub fn types_of_sense(&self, key: &SenseKey) -> Vec<TypeId> {
        self.sense_types
            .get(key)
            .map(|v| v.iter().map(|t| (*t).clone()).collect())
            .unwrap_or_default()
    }

    /// Templates used by lexicon words of `t` and its descendants; when none,
    /// the nearest ancestor's pool.
    pub fn template_pool(&self, t: &TypeId) -> Vec<String> {
        let mut cur = Some(t.clone());
        while let Some(ty) = cur {
            let pool: BTreeSet<String> = self
                .resource
                .senses_under(&ty)
                .flat_map(|(_, s)| s.templates.iter().cloned())
                .collect();
            if !pool.is_empty() {
                return pool.into_iter().collect();
            }
            cur = self.resource.get(&ty).ok().and_then(|o| o.parent.clone());
        }
        Vec::new()
    }

    /// Split tokens, attach readings, and list tokens nothing can account for.
    pub fn lex(&self, gloss: &[GlossToken]) -> (Lexed, Vec<String>) {
        let mut tokens = Vec::new();
        for g in gloss {
            let tag_types = g.sense.as_ref().map(|k| self.types_of_sense(k)).unwrap_or_default();
            for (n, word) in g.form().split_whitespace().enumerate() {
                tokens.push(Token {
                    form: word.to_string(),
                    tag: if n == 0 { g.sense.clone() } else { None },
                    tag_types: if n == 0 { tag_types.clone() } else { Vec::new() },
                });
            }
        }
        let mut readings: Vec<Vec<Reading>> = vec![Vec::new(); tokens.len()];
        for i in 0..tokens.len() {
            readings[i] = self.readings_at(&tokens, i);
        }
        let mut covered = vec![false; tokens.len()];
        for r in readings.iter().flatten() {
            for c in covered.iter_mut().skip(r.start).take(r.len) {
                *c = true;
            }
        }
        let unknown = tokens
            .iter()
            .zip(&covered)
            .filter(|(t, c)| !**c && !is_closed_class(&t.form) && !self.markers.contains(t.form.as_str()))
            .map(|(t, _)| t.form.clone())
            .collect();
        (Lexed { tokens, readings }, unknown)
    }

    fn readings_at(&self, tokens: &[Token], i: usize) -> Vec<Reading> {
        let tok = &tokens[i];
        let mut out: Vec<Reading> = Vec::new();
        let push = |out: &mut Vec<Reading>, len: usize, lemma: &str, pos: Pos, ty: &TypeId, templates: &[String], infl: Infl| {
            let r = Reading {
                start: i,
                len,
                lemma: lemma.to_string(),
                pos,
                ty: ty.clone(),
                templates: templates.to_vec(),
                infl,
                tag_match: tok.tag_types.contains(ty),
            };
            if !out.contains(&r) {
                out.push(r);
            }
        };
        // Multiword verbs first: "take in", "ask for".
        for len in [3usize, 2] {
            if i + len > tokens.len() {
                continue;
            }
            let rest: Vec<&str> = tokens[i + 1..i + len].iter().map(|t| t.form.as_str()).collect();
            for (lemma, infl) in lemma_candidates(&tok.form) {
                let phrase = format!("{lemma} {}", rest.join(" "));
                if let Some(e) = self.resource.entry(&phrase, Pos::V) {
                    if infl_allows(infl, Pos::V) {
                        for s in &e.senses {
                            push(&mut out, len, &phrase, Pos::V, &s.ty, &s.templates, infl);
                        }
                    }
                }
            }
        }
        for (lemma, infl) in lemma_candidates(&tok.form) {
            for e in self.resource.entries_for(&lemma) {
                if !infl_allows(infl, e.pos) {
                    continue;
                }
                for s in &e.senses {
                    push(&mut out, 1, &lemma, e.pos, &s.ty, &s.templates, infl);
                }
            }
        }
        // Senses known only through the gloss tag.
        if let Some(tag) = &tok.tag {
            let pos = Pos::from_ss_type(tag.ss_type());
            let words: Vec<&str> = tag.lemma().split('_').collect();
            let len = words.len();
            let forms_match = i + len <= tokens.len()
                && words[1..]
                    .iter()
                    .zip(&tokens[i + 1..i + len])
                    .all(|(w, t)| *w == t.form);
            let infl = lemma_candidates(&tok.form)
                .into_iter()
                .find(|(l, _)| l == words[0])
                .map(|(_, infl)| infl);
            if let (Some(pos), true, Some(infl)) = (pos, forms_match, infl) {
                for ty in &tok.tag_types {
                    if out.iter().any(|r| &r.ty == ty && r.pos == pos) {
                        continue;
                    }
                    let templates = if pos == Pos::V { self.template_pool(ty) } else { Vec::new() };
                    push(&mut out, len, &words.join(" "), pos, ty, &templates, infl);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_candidates_cover_common_inflections() {
        let has = |form: &str, lemma: &str, infl: Infl| lemma_candidates(form).contains(&(lemma.to_string(), infl));
        assert!(has("liquids", "liquid", Infl::Plural));
        assert!(has("arms", "arm", Infl::Plural));
        assert!(has("rotting", "rot", Infl::Ing));
        assert!(has("heavier", "heavy", Infl::Comparative));
        assert!(has("excited", "excite", Infl::Past));
        assert!(has("die", "die", Infl::Base));
    }
}
