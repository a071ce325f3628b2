//! Sense-tagged gloss corpus: synsets, their definitions and hypernym links.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Pos, SenseKey};

/// One gloss token, optionally tagged with the sense it was disambiguated to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "TokenRecord")]
pub struct GlossToken {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sense: Option<SenseKey>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TokenRecord {
    Plain(String),
    Tagged {
        text: String,
        #[serde(default)]
        lemma: Option<String>,
        #[serde(default)]
        sense: Option<SenseKey>,
    },
}

impl From<TokenRecord> for GlossToken {
    fn from(r: TokenRecord) -> Self {
        match r {
            TokenRecord::Plain(text) => GlossToken::plain(&text),
            TokenRecord::Tagged { text, lemma, sense } => GlossToken { text, lemma, sense },
        }
    }
}

impl GlossToken {
    pub fn plain(text: &str) -> Self {
        GlossToken {
            text: text.to_string(),
            lemma: None,
            sense: None,
        }
    }

    /// Lowercased surface form.
    pub fn form(&self) -> String {
        self.text.to_lowercase()
    }
}

/// Split raw text into word and punctuation tokens.
pub fn tokenize_text(text: &str) -> Vec<GlossToken> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_whitespace() || "(),;\"".contains(c) {
            if !cur.is_empty() {
                out.push(GlossToken::plain(&std::mem::take(&mut cur)));
            }
            if !c.is_whitespace() {
                out.push(GlossToken::plain(&c.to_string()));
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(GlossToken::plain(&cur));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synset {
    pub id: String,
    pub senses: Vec<SenseKey>,
    pub gloss: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tagged_gloss: Vec<GlossToken>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hypernyms: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<String>,
}

impl Synset {
    pub fn pos(&self) -> Option<Pos> {
        self.senses.first().and_then(|k| Pos::from_ss_type(k.ss_type()))
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.senses.iter().map(SenseKey::lemma)
    }

    /// Tokens of the gloss: the tagged form when present, else the raw text split up.
    pub fn tokens(&self) -> Vec<GlossToken> {
        if self.tagged_gloss.is_empty() {
            tokenize_text(&self.gloss)
        } else {
            self.tagged_gloss.clone()
        }
    }

    /// Definitions: `;`-separated segments with quoted examples dropped.
    pub fn definitions(&self) -> Vec<Vec<GlossToken>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        let mut quoted = false;
        for tok in self.tokens() {
            match tok.text.as_str() {
                "\"" => quoted = !quoted,
                ";" => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                }
                _ if quoted || tok.text.starts_with('"') => {}
                _ => cur.push(tok),
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let key = format!("synset {}", self.id);
        if self.senses.is_empty() {
            return Err(Error::invalid(&key, "synset has no senses"));
        }
        for tok in &self.tagged_gloss {
            if let Some(sense) = &tok.sense {
                let span = tok.lemma.clone().unwrap_or_else(|| tok.form()).replace(' ', "_");
                let words: Vec<String> = tok.form().split_whitespace().map(str::to_string).collect();
                let tag = sense.lemma();
                let in_span = span == tag || words.iter().any(|w| w == tag) || words.join("_") == tag;
                if !in_span {
                    return Err(Error::invalid(
                        &key,
                        format!("tag {sense} does not match token {:?}", tok.text),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A validated set of synsets with lookup indexes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    synsets: BTreeMap<String, Synset>,
    by_key: HashMap<SenseKey, String>,
}

impl Corpus {
    pub fn new(synsets: Vec<Synset>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut by_key = HashMap::new();
        for s in synsets {
            s.validate()?;
            for k in &s.senses {
                if let Some(prev) = by_key.insert(k.clone(), s.id.clone()) {
                    return Err(Error::invalid(
                        format!("synset {}", s.id),
                        format!("sense {k} already belongs to synset {prev}"),
                    ));
                }
            }
            if map.contains_key(&s.id) {
                return Err(Error::invalid(format!("synset {}", s.id), "duplicate synset id"));
            }
            map.insert(s.id.clone(), s);
        }
        let corpus = Corpus { synsets: map, by_key };
        corpus.check_hypernyms()?;
        Ok(corpus)
    }

    fn check_hypernyms(&self) -> Result<()> {
        for s in self.synsets.values() {
            for h in &s.hypernyms {
                if self.resolve_id(h).is_none() {
                    return Err(Error::Dangling {
                        key: format!("synset {}", s.id),
                        kind: "hypernym",
                        target: h.clone(),
                    });
                }
            }
        }
        // Depth-first colouring over hypernym links.
        let mut state: HashMap<&str, u8> = HashMap::new();
        for start in self.synsets.keys() {
            if state.contains_key(start.as_str()) {
                continue;
            }
            let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
            state.insert(start, 1);
            while let Some((id, i)) = stack.pop() {
                let hypers = &self.synsets[id].hypernyms;
                if i < hypers.len() {
                    stack.push((id, i + 1));
                    let next = self.resolve_id(&hypers[i]).expect("checked above");
                    match state.get(next) {
                        Some(1) => {
                            return Err(Error::Cycle {
                                what: "hypernym links",
                                key: next.to_string(),
                            })
                        }
                        Some(_) => {}
                        None => {
                            state.insert(next, 1);
                            stack.push((next, 0));
                        }
                    }
                } else {
                    state.insert(id, 2);
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    /// Canonical synset id for either a synset id or one of its sense keys.
    pub fn resolve_id(&self, id_or_key: &str) -> Option<&str> {
        if let Some((id, _)) = self.synsets.get_key_value(id_or_key) {
            return Some(id);
        }
        let key = SenseKey::new(id_or_key).ok()?;
        self.by_key.get(&key).map(String::as_str)
    }

    pub fn get(&self, id_or_key: &str) -> Result<&Synset> {
        self.resolve_id(id_or_key)
            .map(|id| &self.synsets[id])
            .ok_or_else(|| Error::UnknownSynset(id_or_key.to_string()))
    }

    pub fn synset_of(&self, key: &SenseKey) -> Option<&Synset> {
        self.by_key.get(key).map(|id| &self.synsets[id])
    }

    /// Synsets that list `lemma` among their senses.
    pub fn synsets_with_lemma<'a>(&'a self, lemma: &'a str) -> impl Iterator<Item = &'a Synset> + 'a {
        self.synsets.values().filter(move |s| s.lemmas().any(|l| l == lemma))
    }

    /// Hypernym ids of a synset, canonicalised.
    pub fn hypernyms(&self, id: &str) -> Result<Vec<&str>> {
        let s = self.get(id)?;
        Ok(s.hypernyms.iter().filter_map(|h| self.resolve_id(h)).collect())
    }

    pub fn into_synsets(self) -> Vec<Synset> {
        self.synsets.into_values().collect()
    }

    pub fn lemmas(&self) -> BTreeSet<&str> {
        self.synsets.values().flat_map(|s| s.lemmas()).collect()
    }
}

impl Serialize for Corpus {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(self.synsets.values())
    }
}

impl<'de> Deserialize<'de> for Corpus {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Synset>::deserialize(de)?;
        Corpus::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synset(id: &str, hypernyms: &[&str]) -> Synset {
        Synset {
            id: id.to_string(),
            senses: vec![SenseKey::new(id).unwrap()],
            gloss: "x".into(),
            tagged_gloss: vec![],
            hypernyms: hypernyms.iter().map(|s| s.to_string()).collect(),
            examples: vec![],
        }
    }

    #[test]
    fn definitions_split_and_drop_examples() {
        let mut s = synset("breeze%2:38:00::", &[]);
        s.gloss = "to proceed quickly and easily; \"He breezed through the exam\"".into();
        let defs = s.definitions();
        assert_eq!(defs.len(), 1);
        let words: Vec<_> = defs[0].iter().map(|t| t.text.as_str()).collect();
        assert_eq!(words, ["to", "proceed", "quickly", "and", "easily"]);
    }

    #[test]
    fn hypernym_cycle_is_rejected() {
        let err = Corpus::new(vec![
            synset("a%2:30:00::", &["b%2:30:00::"]),
            synset("b%2:30:00::", &["a%2:30:00::"]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Cycle { .. }));
    }

    #[test]
    fn tag_must_match_its_token() {
        let mut s = synset("kill%2:35:00::", &[]);
        s.tagged_gloss = vec![GlossToken {
            text: "die".into(),
            lemma: Some("die".into()),
            sense: Some(SenseKey::new("eat%2:34:00::").unwrap()),
        }];
        assert!(Corpus::new(vec![s]).is_err());
    }

    #[test]
    fn lookup_by_sense_key() {
        let c = Corpus::new(vec![synset("eat%2:34:00::", &[])]).unwrap();
        assert_eq!(c.resolve_id("eat%2:34:00::"), Some("eat%2:34:00::"));
        assert!(c.get("nope%2:34:00::").is_err());
    }
}
