//! Rule-based question detector.

use crate::text::tokenize;

const WH_WORDS: &[&str] = &["what", "how", "where", "when", "why", "which", "who", "whose", "whom"];

const QUESTION_AUX: &[&str] = &[
    "do", "does", "did", "can", "could", "should", "would", "will", "is", "are", "am", "was", "were", "have", "has", "may",
    "might", "shall", "don't", "doesn't", "can't", "isn't", "aren't", "what's",
];

const QUANTIFIERS: &[&str] = &["many", "much", "long", "often", "far", "big", "old", "soon", "hot", "warm", "thick"];

const SUBJECTS: &[&str] =
    &["i", "you", "we", "they", "it", "he", "she", "this", "that", "there", "these", "those", "the", "a", "my", "your"];

/// `(is_question, confidence)`.
///
/// An interrogative template (wh-word followed by an auxiliary or a
/// quantifier, or an auxiliary followed by a subject) gives confidence 1.0.
/// Otherwise a leading wh-word and a trailing question mark each count as a
/// weak cue: one cue gives 0.6, both give 0.8. No cue means not a question.
pub fn detect_question(utterance: &str) -> (bool, f64) {
    let tokens = tokenize(utterance);
    let Some(first) = tokens.first().map(String::as_str) else {
        return (false, 0.0);
    };
    let second = tokens.get(1).map(String::as_str);

    let wh_first = WH_WORDS.contains(&first);
    if wh_first && second.is_some_and(|s| QUESTION_AUX.contains(&s) || QUANTIFIERS.contains(&s)) {
        return (true, 1.0);
    }
    if first == "what's" || first == "how's" || first == "where's" {
        return (true, 1.0);
    }
    if QUESTION_AUX.contains(&first) && second.is_some_and(|s| SUBJECTS.contains(&s)) && tokens.len() > 2 {
        return (true, 1.0);
    }

    // "how to ..." opens most DIY requests, so on its own it is not a cue.
    let how_to = first == "how" && second == Some("to");
    let cues = usize::from(wh_first && !how_to) + usize::from(utterance.trim_end().ends_with('?'));
    match cues {
        0 => (false, 0.0),
        1 => (true, 0.6),
        _ => (true, 0.8),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(detect_question("How many eggs to make the cake?"), (true, 1.0));
        assert!(!detect_question("next step").0);
        let (q, c) = detect_question("where to place it");
        assert!(q && c >= 0.6);
        assert_eq!(detect_question("Where to place it?"), (true, 0.8));
        assert_eq!(detect_question("How long does it take to steam tomatoes?"), (true, 1.0));
        assert_eq!(detect_question("can I use margarine instead"), (true, 1.0));
        assert!(!detect_question("How to fix a roof").0);
        assert!(!detect_question("").0);
    }
}
