//! Answer-quality metrics: fuzzy score, token F1 and exact match.
//!
//! All three share one normalization (lowercase, punctuation removed,
//! whitespace collapsed), so exact match implies F1 of 1, and F1 of 1
//! implies a fuzzy score of 100 because the fuzzy score compares the
//! normalized tokens in sorted order.

use std::collections::HashMap;

use crate::retrieval::levenshtein;

/// Lowercased whitespace tokens with every non-alphanumeric character dropped.
pub fn answer_tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

pub fn normalize_answer(text: &str) -> String {
    answer_tokens(text).join(" ")
}

fn sorted_tokens(text: &str) -> String {
    let mut tokens = answer_tokens(text);
    tokens.sort();
    tokens.join(" ")
}

/// `100 * (1 - distance / longest)` over the token-sorted normalized
/// strings; 100 when both are empty.
pub fn fuzzy_match_score(gold: &str, pred: &str) -> f64 {
    let (gold, pred) = (sorted_tokens(gold), sorted_tokens(pred));
    let longest = gold.chars().count().max(pred.chars().count());
    if longest == 0 {
        return 100.0;
    }
    100.0 * (1.0 - levenshtein(&gold, &pred) as f64 / longest as f64)
}

/// Harmonic mean of token precision and recall, counting repeated tokens.
pub fn token_f1(gold: &str, pred: &str) -> f64 {
    let (gold, pred) = (answer_tokens(gold), answer_tokens(pred));
    if gold.is_empty() || pred.is_empty() {
        return if gold.is_empty() && pred.is_empty() { 1.0 } else { 0.0 };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &gold {
        *counts.entry(t).or_default() += 1;
    }
    let mut common = 0usize;
    for t in &pred {
        if let Some(c) = counts.get_mut(t.as_str()).filter(|c| **c > 0) {
            *c -= 1;
            common += 1;
        }
    }
    if common == 0 {
        return 0.0;
    }
    let precision = common as f64 / pred.len() as f64;
    let recall = common as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

pub fn exact_match(gold: &str, pred: &str) -> u8 {
    u8::from(normalize_answer(gold) == normalize_answer(pred))
}
