//! Tokenization, normalization and suffix stemming shared by every module.

use std::collections::HashSet;
use std::ops::Range;

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Byte ranges of the word tokens in `text`.
///
/// A token is a run of alphanumeric characters; an apostrophe is kept when it
/// sits between two alphanumerics ("don't", "let's"). Everything else is a
/// separator.
pub fn token_spans(text: &str) -> Vec<Range<usize>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &(pos, c)) in chars.iter().enumerate() {
        let inner_apostrophe = is_apostrophe(c) && start.is_some() && chars.get(i + 1).is_some_and(|&(_, n)| n.is_alphanumeric());
        if c.is_alphanumeric() || inner_apostrophe {
            start.get_or_insert(pos);
        } else if let Some(s) = start.take() {
            spans.push(s..pos);
        }
    }
    if let Some(s) = start {
        spans.push(s..text.len());
    }
    spans
}

/// Lowercased word tokens, with curly apostrophes folded to `'`.
pub fn tokenize(text: &str) -> Vec<String> {
    token_spans(text).into_iter().map(|r| text[r].to_lowercase().replace('\u{2019}', "'")).collect()
}

/// Lowercased tokens joined by single spaces.
pub fn normalize(text: &str) -> String {
    tokenize(text).join(" ")
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| "aeiouy".contains(c))
}

fn is_consonant(c: char) -> bool {
    c.is_ascii_alphabetic() && !"aeiou".contains(c)
}

/// Suffix stripper for plural, -ing and -ed forms.
///
/// Only consistency matters: "fix", "fixes", "fixing" and "fixed" all reduce
/// to the same stem, and so do "bake"/"baking" and "berry"/"berries".
pub fn stem(word: &str) -> String {
    let mut w = word.to_lowercase();
    if w.chars().count() <= 3 || !w.is_ascii() {
        return w;
    }

    if w.ends_with("sses") {
        w.truncate(w.len() - 2);
    } else if w.ends_with("ies") && w.len() > 4 {
        w.truncate(w.len() - 3);
        w.push('y');
    } else if w.ends_with("es") && w.len() > 4 && ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| w[..w.len() - 2].ends_with(s)) {
        w.truncate(w.len() - 2);
    } else if w.ends_with('s') && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is") {
        w.truncate(w.len() - 1);
    }

    for suffix in ["ing", "ed"] {
        if w.ends_with(suffix) {
            let base = &w[..w.len() - suffix.len()];
            if base.len() >= 3 && has_vowel(base) {
                w.truncate(base.len());
                let b = w.as_bytes();
                let n = b.len();
                if n >= 2 && b[n - 1] == b[n - 2] && is_consonant(b[n - 1] as char) && !b"lsz".contains(&b[n - 1]) {
                    w.truncate(n - 1);
                }
            }
            break;
        }
    }

    if w.len() > 3 && w.ends_with('e') {
        w.truncate(w.len() - 1);
    }
    if w.len() > 3 && w.ends_with('y') {
        let prev = w.as_bytes()[w.len() - 2] as char;
        if is_consonant(prev) {
            w.truncate(w.len() - 1);
            w.push('i');
        }
    }
    w
}

/// Stems of every token in `text`.
pub fn stems(text: &str) -> Vec<String> {
    tokenize(text).iter().map(|t| stem(t)).collect()
}

/// Closed list of function words.
#[derive(Debug, Clone, Default)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    pub fn parse(text: &str) -> Self {
        let words = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_lowercase).collect();
        Self { words }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    /// Non-stopword tokens of `text`, lowercased, in order.
    pub fn content_tokens(&self, text: &str) -> Vec<String> {
        tokenize(text).into_iter().filter(|t| !self.contains(t)).collect()
    }

    /// Stems of the non-stopword tokens of `text`, deduplicated, in order.
    pub fn content_stems(&self, text: &str) -> Vec<String> {
        let mut seen = HashSet::new();
        self.content_tokens(text).iter().map(|t| stem(t)).filter(|s| seen.insert(s.clone())).collect()
    }
}

/// Replace the first character with its uppercase form.
pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// "a" or "an" for the word that follows.
pub fn indefinite_article(next_word: &str) -> &'static str {
    match next_word.chars().next() {
        Some(c) if "aeiouAEIOU".contains(c) => "an",
        _ => "a",
    }
}

const CARDINALS: [&str; 20] = [
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
    "twenty",
];

const ORDINALS: [&str; 20] = [
    "first",
    "second",
    "third",
    "fourth",
    "fifth",
    "sixth",
    "seventh",
    "eighth",
    "ninth",
    "tenth",
    "eleventh",
    "twelfth",
    "thirteenth",
    "fourteenth",
    "fifteenth",
    "sixteenth",
    "seventeenth",
    "eighteenth",
    "nineteenth",
    "twentieth",
];

/// "3" or "three" as 3. Words cover one to twenty.
pub fn cardinal(token: &str) -> Option<usize> {
    if !token.is_empty() && token.bytes().all(|b| b.is_ascii_digit()) {
        return token.parse().ok();
    }
    CARDINALS.iter().position(|w| *w == token).map(|i| i + 1)
}

/// "third" or "3rd" as 3.
pub fn ordinal(token: &str) -> Option<usize> {
    if let Some(i) = ORDINALS.iter().position(|w| *w == token) {
        return Some(i + 1);
    }
    let digits = token
        .strip_suffix("st")
        .or_else(|| token.strip_suffix("nd"))
        .or_else(|| token.strip_suffix("rd"))
        .or_else(|| token.strip_suffix("th"))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Cut `text` to at most `max_chars` characters, ending on a word boundary
/// with an ellipsis when anything was removed.
pub fn truncate_chars(text: &str, max_chars: usize) -> String {
    if text.chars().count() <= max_chars {
        return text.to_string();
    }
    let budget = max_chars.saturating_sub(3);
    let cut: String = text.chars().take(budget).collect();
    let cut = match cut.rfind(' ') {
        Some(i) if i > budget / 2 => cut[..i].to_string(),
        _ => cut,
    };
    format!("{}...", cut.trim_end_matches([',', ';', ':', ' ']))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_on_whitespace_and_punctuation() {
        assert_eq!(tokenize("My roof is broken."), ["my", "roof", "is", "broken"]);
        assert_eq!(tokenize("I'm looking... any suggestion?"), ["i'm", "looking", "any", "suggestion"]);
        assert_eq!(tokenize("gluten-free"), ["gluten", "free"]);
        assert_eq!(tokenize("Don\u{2019}t"), ["don't"]);
        assert!(tokenize("  ?! ").is_empty());
    }

    #[test]
    fn spans_index_original_text() {
        let text = "Bake for 25 minutes.";
        let spans = token_spans(text);
        assert_eq!(&text[spans[2].clone()], "25");
        assert_eq!(&text[spans[3].clone()], "minutes");
    }

    #[test]
    fn stemmer_conflates_inflections() {
        for group in [
            &["fix", "fixes", "fixing", "fixed"][..],
            &["bake", "baking", "baked", "bakes"],
            &["berry", "berries"],
            &["cookie", "cookies"],
            &["tomato", "tomatoes"],
            &["egg", "eggs"],
            &["clog", "clogged"],
            &["strawberry", "strawberries"],
            &["roof", "roofs"],
        ] {
            let first = stem(group[0]);
            for w in group {
                assert_eq!(stem(w), first, "{w}");
            }
        }
        assert_eq!(stem("glass"), "glass");
        assert_eq!(stem("pie"), stem("pies"));
        assert_eq!(stem("seed"), "seed");
    }

    #[test]
    fn truncation_respects_budget() {
        let long = "word ".repeat(200);
        let cut = truncate_chars(&long, 600);
        assert!(cut.chars().count() <= 600);
        assert!(cut.ends_with("..."));
        assert_eq!(truncate_chars("short", 600), "short");
    }

    #[test]
    fn number_words() {
        assert_eq!(cardinal("three"), Some(3));
        assert_eq!(cardinal("12"), Some(12));
        assert_eq!(cardinal("third"), None);
        assert_eq!(ordinal("third"), Some(3));
        assert_eq!(ordinal("21st"), Some(21));
        assert_eq!(ordinal("th"), None);
        assert_eq!(ordinal("last"), None);
    }
}
