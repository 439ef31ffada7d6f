//! Picking one of the presented options by order or by name.

use serde::{Deserialize, Serialize};

use crate::text::{cardinal, normalize, ordinal, tokenize};

pub const DEFAULT_CONFIRM_THRESHOLD: f64 = 0.3;

/// Unit-cost edit distance over the lowercased characters of `a` and `b`.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.to_lowercase().chars().collect();
    let b: Vec<char> = b.to_lowercase().chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diagonal = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(ca != cb);
            row[j + 1] = (above + 1).min(row[j] + 1).min(diagonal + cost);
            diagonal = above;
        }
    }
    row[b.len()]
}

/// `levenshtein(a, b) / max(len)`, 0 for two empty strings.
pub fn normalized_distance(a: &str, b: &str) -> f64 {
    let longest = a.to_lowercase().chars().count().max(b.to_lowercase().chars().count());
    if longest == 0 {
        0.0
    } else {
        levenshtein(a, b) as f64 / longest as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// 0-based option index.
    pub index: usize,
    pub normalized_distance: f64,
    pub needs_confirmation: bool,
}

const FILLERS: &[&str] = &[
    "i", "i'd", "i'll", "i'm", "want", "like", "take", "let's", "lets", "do", "go", "with", "give", "me", "choose", "pick",
    "select", "please", "the", "number", "option", "choice", "item", "one", "how", "about", "will", "us", "for", "a", "to",
    "try", "make", "that", "start", "ok", "okay", "yes", "sounds", "good",
];

fn ordinal_value(token: &str) -> Option<Ordinal> {
    if token == "last" {
        return Some(Ordinal::Last);
    }
    ordinal(token).map(Ordinal::Nth)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ordinal {
    Nth(usize),
    Last,
}

/// An order reference such as "the second one", "number two" or "3". Every
/// other token must be a filler word.
fn parse_order(tokens: &[String]) -> Option<Ordinal> {
    let mut found = None;
    for (i, t) in tokens.iter().enumerate() {
        let value = ordinal_value(t).or_else(|| {
            let after_marker = i > 0 && matches!(tokens[i - 1].as_str(), "number" | "option" | "choice" | "item");
            let alone = tokens.len() == 1;
            cardinal(t).filter(|_| after_marker || alone || t.chars().all(|c| c.is_ascii_digit())).map(Ordinal::Nth)
        });
        match value {
            Some(v) if found.is_none() => found = Some(v),
            Some(_) => return None,
            None if FILLERS.contains(&t.as_str()) => {}
            None => return None,
        }
    }
    found
}

fn strip_fillers(tokens: &[String]) -> String {
    tokens.iter().filter(|t| !FILLERS.contains(&t.as_str())).cloned().collect::<Vec<_>>().join(" ")
}

/// Resolve a choice among `options`.
///
/// Order references win outright with distance 0. Otherwise the option
/// closest by normalized edit distance is chosen, comparing both the whole
/// utterance and the utterance without filler words; ties go to the earlier
/// option. Returns `None` only for an empty option list.
pub fn match_selection(utterance: &str, options: &[String], threshold: f64) -> Option<Selection> {
    if options.is_empty() {
        return None;
    }
    let tokens = tokenize(utterance);
    if let Some(order) = parse_order(&tokens) {
        let index = match order {
            Ordinal::Nth(n) => n.checked_sub(1),
            Ordinal::Last => Some(options.len() - 1),
        };
        if let Some(index) = index.filter(|&i| i < options.len()) {
            return Some(Selection { index, normalized_distance: 0.0, needs_confirmation: false });
        }
    }
    let whole = normalize(utterance);
    let core = strip_fillers(&tokens);
    let mut best = Selection { index: 0, normalized_distance: f64::INFINITY, needs_confirmation: true };
    for (i, option) in options.iter().enumerate() {
        let target = normalize(option);
        let mut d = normalized_distance(&whole, &target);
        if !core.is_empty() {
            d = d.min(normalized_distance(&core, &target));
        }
        if d < best.normalized_distance {
            best = Selection { index: i, normalized_distance: d, needs_confirmation: d > threshold };
        }
    }
    Some(best)
}
