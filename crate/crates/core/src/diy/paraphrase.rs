//! Rewrites a DIY utterance into ranked "How to ..." candidates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::commonsense::find_problems;
use super::entailment::heuristic_entailment;
use crate::pos::{is_auxiliary, is_determiner, is_possessive, PosTag};
use crate::resources::Knowledge;
use crate::text::{indefinite_article, normalize, token_spans, tokenize};

pub const DEFAULT_CANDIDATES: usize = 3;
pub const PREFIX: &str = "How to ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParaphraseCandidate {
    pub text: String,
    /// Entailment of `text` by the original utterance.
    pub rank_score: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParaphraseError {
    #[error("candidate count must be at least 1")]
    ZeroCount,
    #[error("utterance has no words")]
    EmptyUtterance,
}

const LEAD_INS: &[&[&str]] = &[
    &["can", "you", "tell", "me", "how", "to"],
    &["could", "you", "tell", "me", "how", "to"],
    &["what", "is", "the", "best", "way", "to"],
    &["what's", "the", "best", "way", "to"],
    &["is", "there", "a", "way", "to"],
    &["tell", "me", "how", "to"],
    &["show", "me", "how", "to"],
    &["teach", "me", "how", "to"],
    &["i", "would", "like", "to"],
    &["can", "you", "help", "me"],
    &["i", "want", "to"],
    &["i", "need", "to"],
    &["i'd", "like", "to"],
    &["i'm", "trying", "to"],
    &["how", "do", "i"],
    &["how", "can", "i"],
    &["how", "should", "i"],
    &["how", "would", "i"],
    &["how", "do", "you"],
    &["help", "me"],
    &["i", "wanna"],
    &["i", "want"],
    &["i", "need"],
    &["how", "to"],
    &["let's"],
    &["please"],
    &["hi"],
    &["hello"],
    &["hey"],
    &["so"],
];

/// Number of leading tokens that are lead-in phrases.
fn lead_in_len(tokens: &[String]) -> usize {
    let mut k = 0;
    'outer: loop {
        for lead in LEAD_INS {
            let end = k + lead.len();
            if end < tokens.len() && tokens[k..end].iter().zip(lead.iter()).all(|(a, b)| a == b) {
                k = end;
                continue 'outer;
            }
        }
        return k;
    }
}

struct Draft {
    text: String,
    direct: bool,
}

/// Up to `n` "How to" rewrites, best first.
///
/// An utterance that already reads as a how-to (after stripping lead-ins
/// such as "I want to") is kept as the direct candidate. Further candidates
/// pair the main verb and every remedy verb of a stated problem with the
/// object noun phrase, with and without the problem adjectives. Ordering is
/// by entailment score, then direct before composed, then text.
pub fn paraphrase_howto(kb: &Knowledge, utterance: &str, n: usize) -> Result<Vec<ParaphraseCandidate>, ParaphraseError> {
    if n == 0 {
        return Err(ParaphraseError::ZeroCount);
    }
    let spans = token_spans(utterance);
    let tokens = tokenize(utterance);
    if tokens.is_empty() {
        return Err(ParaphraseError::EmptyUtterance);
    }
    let tags = kb.tagger.tag_tokens(&tokens);
    let k = lead_in_len(&tokens);
    let rest_text = &utterance[spans[k].start..spans[spans.len() - 1].end];

    let mut drafts: Vec<Draft> = Vec::new();
    let mut verbs: Vec<String> = Vec::new();

    let mut in_context: Vec<String> = vec!["how".into(), "to".into()];
    in_context.extend_from_slice(&tokens[k..]);
    let context_tags = kb.tagger.tag_tokens(&in_context);
    if context_tags[2] == PosTag::Verb && !is_auxiliary(&in_context[2]) {
        drafts.push(Draft { text: format!("{PREFIX}{rest_text}"), direct: true });
        verbs.push(tokens[k].clone());
    } else if let Some(v) =
        (k..tokens.len()).find(|&i| tags[i] == PosTag::Verb && !is_auxiliary(&tokens[i]) && i + 1 < tokens.len())
    {
        verbs.push(tokens[v].clone());
    }

    let hits: Vec<_> = find_problems(&kb.commonsense, &tokens, &tags).into_iter().filter(|h| h.index >= k).collect();
    for hit in &hits {
        for remedy in &hit.remedies {
            if !verbs.contains(&remedy.remedy) {
                verbs.push(remedy.remedy.clone());
            }
        }
    }

    let head = hits.iter().find_map(|h| h.object).or_else(|| (k..tokens.len()).rev().find(|&i| tags[i] == PosTag::Noun));
    if let Some(head) = head {
        let mut start = head;
        while start > k && matches!(tags[start - 1], PosTag::Noun | PosTag::Adjective) && !is_determiner(&tokens[start - 1]) {
            start -= 1;
        }
        let core = tokens[start..=head].join(" ");
        let determiner = (start > k && is_determiner(&tokens[start - 1])).then(|| tokens[start - 1].as_str());
        let modifiers: Vec<&str> = hits
            .iter()
            .filter(|h| tags[h.index] == PosTag::Adjective && !(start..=head).contains(&h.index))
            .map(|h| tokens[h.index].as_str())
            .collect();

        let phrase = |mods: &[&str]| {
            let body = if mods.is_empty() { core.clone() } else { format!("{} {core}", mods.join(" ")) };
            match determiner {
                None => body,
                Some(d) if is_possessive(d) || d == "a" || d == "an" => format!("{} {body}", indefinite_article(&body)),
                Some(d) => format!("{d} {body}"),
            }
        };
        for verb in &verbs {
            if !modifiers.is_empty() {
                drafts.push(Draft { text: format!("{PREFIX}{verb} {}", phrase(&modifiers)), direct: false });
            }
            drafts.push(Draft { text: format!("{PREFIX}{verb} {}", phrase(&[])), direct: false });
        }
    }

    if drafts.is_empty() {
        drafts.push(Draft { text: format!("{PREFIX}{rest_text}"), direct: true });
    }

    let mut scored: Vec<(ParaphraseCandidate, bool)> = drafts
        .into_iter()
        .map(|d| {
            let rank_score = heuristic_entailment(kb, utterance, &d.text).unwrap_or(0.0);
            (ParaphraseCandidate { text: d.text, rank_score }, d.direct)
        })
        .collect();
    scored.sort_by(|(a, a_direct), (b, b_direct)| {
        b.rank_score.total_cmp(&a.rank_score).then(b_direct.cmp(a_direct)).then_with(|| a.text.cmp(&b.text))
    });
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for (candidate, _) in scored {
        let key = normalize(&candidate.text);
        if !seen.contains(&key) {
            seen.push(key);
            out.push(candidate);
        }
        if out.len() == n {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(utterance: &str) -> Vec<String> {
        paraphrase_howto(Knowledge::bundled(), utterance, DEFAULT_CANDIDATES).unwrap().into_iter().map(|c| c.text).collect()
    }

    #[test]
    fn examples() {
        let broken = texts("My roof is broken.");
        assert!(broken.contains(&"How to fix a broken roof".to_string()), "{broken:?}");
        assert_eq!(broken[0], "How to fix a broken roof");
        assert_eq!(texts("How to fix a roof")[0], "How to fix a roof");
        assert_eq!(texts("clean grout")[0], "How to clean grout");
    }

    #[test]
    fn lead_ins_are_stripped() {
        assert_eq!(texts("I want to paint my bedroom")[0], "How to paint my bedroom");
        assert_eq!(texts("how tall can nice my bedroom")[0], "How to decorate a nice bedroom");
    }

    #[test]
    fn fallback_keeps_the_prefix() {
        assert_eq!(texts("bookshelf"), ["How to bookshelf"]);
    }

    #[test]
    fn count_is_respected() {
        let kb = Knowledge::bundled();
        assert_eq!(paraphrase_howto(kb, "My roof is broken", 1).unwrap().len(), 1);
        assert_eq!(paraphrase_howto(kb, "My roof is broken", 0), Err(ParaphraseError::ZeroCount));
        assert_eq!(paraphrase_howto(kb, "?!", 3), Err(ParaphraseError::EmptyUtterance));
    }

    #[test]
    fn sorted_by_score() {
        let c = paraphrase_howto(Knowledge::bundled(), "my kitchen sink is clogged", 3).unwrap();
        assert!(c.windows(2).all(|w| w[0].rank_score >= w[1].rank_score));
    }
}
