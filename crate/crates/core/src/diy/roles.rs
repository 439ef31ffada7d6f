//! Verb and object extraction from a "How to ..." sentence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pos::{is_auxiliary, is_determiner, PosTag};
use crate::resources::Knowledge;
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateArgument {
    pub verb: String,
    /// The object phrase, empty when the verb has none.
    pub arg1: String,
    /// Last noun of `arg1`, empty exactly when `arg1` is.
    pub arg1_head_noun: String,
    /// Content tokens other than the verb and the head noun.
    pub remainder_terms: Vec<String>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RoleError {
    #[error("sentence does not start with \"How to\"")]
    NotHowTo,
    #[error("no main verb after \"How to\"")]
    VerbMissing,
}

/// Main verb, its object phrase and the object's head noun.
///
/// The verb is the first non-auxiliary verb after "how to". The object is
/// the first run of determiners, adjectives and nouns after it, cut back to
/// end on its last noun, which becomes the head.
pub fn extract_roles(kb: &Knowledge, sentence: &str) -> Result<PredicateArgument, RoleError> {
    let tokens = tokenize(sentence);
    if tokens.len() < 2 || tokens[0] != "how" || tokens[1] != "to" {
        return Err(RoleError::NotHowTo);
    }
    let tags = kb.tagger.tag_tokens(&tokens);
    let verb_at =
        (2..tokens.len()).find(|&i| tags[i] == PosTag::Verb && !is_auxiliary(&tokens[i])).ok_or(RoleError::VerbMissing)?;

    let in_phrase = |i: usize| {
        is_determiner(&tokens[i])
            || matches!(tags[i], PosTag::Noun | PosTag::Adjective)
            || (tags[i] == PosTag::Other && tokens[i].chars().all(|c| c.is_ascii_digit()))
    };
    let mut arg = None;
    let mut i = verb_at + 1;
    while i < tokens.len() {
        if in_phrase(i) {
            let start = i;
            while i < tokens.len() && in_phrase(i) {
                i += 1;
            }
            if let Some(head) = (start..i).rev().find(|&j| tags[j] == PosTag::Noun) {
                arg = Some((start, head));
                break;
            }
        } else {
            i += 1;
        }
    }

    let (arg1, head) = match arg {
        Some((start, head)) => (tokens[start..=head].join(" "), Some(head)),
        None => (String::new(), None),
    };
    let mut remainder_terms: Vec<String> = Vec::new();
    for (j, t) in tokens.iter().enumerate().skip(2) {
        if j == verb_at || Some(j) == head || kb.stopwords.contains(t) || remainder_terms.contains(t) {
            continue;
        }
        remainder_terms.push(t.clone());
    }
    Ok(PredicateArgument {
        verb: tokens[verb_at].clone(),
        arg1,
        arg1_head_noun: head.map(|h| tokens[h].clone()).unwrap_or_default(),
        remainder_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roles(s: &str) -> Result<PredicateArgument, RoleError> {
        extract_roles(Knowledge::bundled(), s)
    }

    #[test]
    fn examples() {
        let r = roles("How to fix a broken roof").unwrap();
        assert_eq!((r.verb.as_str(), r.arg1.as_str(), r.arg1_head_noun.as_str()), ("fix", "a broken roof", "roof"));
        assert_eq!(r.remainder_terms, ["broken"]);

        let r = roles("How to bake bread").unwrap();
        assert_eq!((r.verb.as_str(), r.arg1_head_noun.as_str()), ("bake", "bread"));

        let r = roles("How to garden").unwrap();
        assert_eq!(r.verb, "garden");
        assert!(r.arg1.is_empty() && r.arg1_head_noun.is_empty());
    }

    #[test]
    fn object_stops_at_preposition() {
        let r = roles("How to patch a hole in drywall").unwrap();
        assert_eq!(r.arg1, "a hole");
        assert_eq!(r.remainder_terms, ["drywall"]);
    }

    #[test]
    fn errors() {
        assert_eq!(roles("fix the roof"), Err(RoleError::NotHowTo));
        assert_eq!(roles("How to the roof"), Err(RoleError::VerbMissing));
    }
}
