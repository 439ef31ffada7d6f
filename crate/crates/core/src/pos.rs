//! Part-of-speech tagging from a closed lexicon with suffix fallback.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lexicon::{parse_rows, LoadError};
use crate::text::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Pronoun,
    Conjunction,
    Preposition,
    Interjection,
    Other,
}

impl PosTag {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "noun" => Self::Noun,
            "verb" => Self::Verb,
            "adj" => Self::Adjective,
            "adv" => Self::Adverb,
            "pron" => Self::Pronoun,
            "conj" => Self::Conjunction,
            "prep" => Self::Preposition,
            "interj" => Self::Interjection,
            "other" => Self::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Auxiliaries and modals. They are tagged `Verb` but never count as the
/// main verb of a sentence.
pub const AUXILIARIES: &[&str] = &[
    "be",
    "am",
    "is",
    "are",
    "was",
    "were",
    "been",
    "being",
    "'s",
    "'re",
    "'m",
    "do",
    "does",
    "did",
    "done",
    "have",
    "has",
    "had",
    "having",
    "can",
    "could",
    "will",
    "would",
    "shall",
    "should",
    "may",
    "might",
    "must",
    "i'm",
    "it's",
    "you're",
    "we're",
    "they're",
    "that's",
    "isn't",
    "aren't",
    "wasn't",
    "weren't",
    "don't",
    "doesn't",
    "didn't",
    "can't",
    "couldn't",
    "won't",
    "wouldn't",
    "shouldn't",
    "i've",
    "i'd",
    "i'll",
    "let's",
];

pub fn is_auxiliary(token: &str) -> bool {
    AUXILIARIES.contains(&token)
}

const POSSESSIVES: &[&str] = &["my", "your", "his", "her", "its", "our", "their"];
const SUBJECTS: &[&str] = &["i", "you", "we", "they", "he", "she"];
const DETERMINERS: &[&str] = &["a", "an", "the", "this", "that", "these", "those", "some", "any", "another", "each", "every"];

pub fn is_determiner(token: &str) -> bool {
    DETERMINERS.contains(&token) || POSSESSIVES.contains(&token)
}

pub fn is_possessive(token: &str) -> bool {
    POSSESSIVES.contains(&token)
}

#[derive(Debug, Clone, Default)]
pub struct PosTagger {
    lexicon: HashMap<String, Vec<PosTag>>,
}

impl PosTagger {
    /// Parse `word<TAB>tag[,tag...]` lines.
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let mut lexicon = HashMap::new();
        for row in parse_rows(text, 2)? {
            let tags = row.fields[1]
                .split(',')
                .map(|t| {
                    PosTag::parse(t.trim())
                        .ok_or_else(|| LoadError::Malformed { line: row.line, message: format!("unknown tag {t:?}") })
                })
                .collect::<Result<Vec<_>, _>>()?;
            lexicon.insert(row.fields[0].to_lowercase(), tags);
        }
        Ok(Self { lexicon })
    }

    /// Lexicon tags for a word, without context.
    pub fn lookup(&self, token: &str) -> Option<&[PosTag]> {
        self.lexicon.get(token).map(Vec::as_slice)
    }

    pub fn tag(&self, sentence: &str) -> Vec<(String, PosTag)> {
        let tokens = tokenize(sentence);
        let tags = self.tag_tokens(&tokens);
        tokens.into_iter().zip(tags).collect()
    }

    /// Tag already-tokenized (lowercase) text.
    pub fn tag_tokens(&self, tokens: &[String]) -> Vec<PosTag> {
        let mut tags: Vec<PosTag> = Vec::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            let tag = match self.candidates(token) {
                Candidates::One(t) => t,
                Candidates::Many(options) => {
                    let prev = i.checked_sub(1).map(|p| (tokens[p].as_str(), tags[p]));
                    let next = tokens.get(i + 1).map(|n| self.default_tag(n));
                    disambiguate(options, prev, next)
                }
            };
            tags.push(tag);
        }
        tags
    }

    fn default_tag(&self, token: &str) -> PosTag {
        match self.candidates(token) {
            Candidates::One(t) => t,
            Candidates::Many(options) => options[0],
        }
    }

    fn candidates<'a>(&'a self, token: &str) -> Candidates<'a> {
        if is_auxiliary(token) {
            return Candidates::One(PosTag::Verb);
        }
        if let Some(tags) = self.lexicon.get(token) {
            return match tags.as_slice() {
                [single] => Candidates::One(*single),
                many => Candidates::Many(many),
            };
        }
        Candidates::One(suffix_tag(token))
    }
}

enum Candidates<'a> {
    One(PosTag),
    Many(&'a [PosTag]),
}

fn suffix_tag(token: &str) -> PosTag {
    if token.chars().all(|c| c.is_ascii_digit()) {
        PosTag::Other
    } else if token.len() > 4 && token.ends_with("ly") {
        PosTag::Adverb
    } else if token.len() > 4 && (token.ends_with("ing") || token.ends_with("ed")) {
        PosTag::Verb
    } else {
        PosTag::Noun
    }
}

fn is_nominal(tag: PosTag) -> bool {
    matches!(tag, PosTag::Noun | PosTag::Adjective)
}

/// Pick among the lexicon's tags for an ambiguous word from its neighbours.
fn disambiguate(options: &[PosTag], prev: Option<(&str, PosTag)>, next: Option<PosTag>) -> PosTag {
    let has = |t: PosTag| options.contains(&t);
    let verbal_context = match prev {
        None => true,
        Some((word, _)) => word == "to" || is_auxiliary(word) || SUBJECTS.contains(&word),
    };
    if verbal_context && has(PosTag::Verb) {
        return PosTag::Verb;
    }
    let nominal_context = prev.is_some_and(|(word, tag)| {
        is_determiner(word) || matches!(tag, PosTag::Adjective | PosTag::Noun | PosTag::Verb | PosTag::Preposition)
    });
    if nominal_context {
        let modifies_next = next.is_some_and(is_nominal);
        if modifies_next && has(PosTag::Adjective) {
            return PosTag::Adjective;
        }
        if has(PosTag::Noun) {
            return PosTag::Noun;
        }
        if has(PosTag::Adjective) {
            return PosTag::Adjective;
        }
    }
    options[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::Knowledge;

    fn tags(sentence: &str) -> Vec<PosTag> {
        Knowledge::bundled().tagger.tag(sentence).into_iter().map(|(_, t)| t).collect()
    }

    #[test]
    fn lexicon_and_suffix_rules() {
        assert_eq!(tags("fix"), [PosTag::Verb]);
        assert_eq!(tags("roof"), [PosTag::Noun]);
        assert_eq!(tags("quickly"), [PosTag::Adverb]);
        assert_eq!(tags("zorbling"), [PosTag::Verb]);
        assert_eq!(tags("zorblax"), [PosTag::Noun]);
        assert_eq!(tags("42"), [PosTag::Other]);
    }

    #[test]
    fn ambiguous_words_follow_context() {
        use PosTag::*;
        assert_eq!(tags("how to garden")[2], Verb);
        assert_eq!(tags("how to plant a vegetable garden"), [Adverb, Preposition, Verb, Other, Noun, Noun]);
        assert_eq!(tags("how to fix a broken roof"), [Adverb, Preposition, Verb, Other, Adjective, Noun]);
        assert_eq!(tags("how to clean grout")[2..], [Verb, Noun]);
        assert_eq!(tags("where to place it")[2], Verb);
        assert_eq!(tags("my roof is broken"), [Pronoun, Noun, Verb, Adjective]);
    }

    #[test]
    fn every_token_gets_a_tag() {
        let sentence = "Well, I can't believe the 3 shiny new pans aren't here!";
        let tagged = Knowledge::bundled().tagger.tag(sentence);
        assert_eq!(tagged.len(), tokenize(sentence).len());
    }
}
