//! Tab-separated lexicon files and phrase matching over token sequences.

use std::collections::HashMap;

use thiserror::Error;

use crate::text::{stem, tokenize};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    InFile {
        file: String,
        #[source]
        source: Box<LoadError>,
    },
}

impl LoadError {
    pub fn in_file(self, file: impl Into<String>) -> Self {
        LoadError::InFile { file: file.into(), source: Box::new(self) }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    /// 1-based line number in the source text.
    pub line: usize,
    pub fields: Vec<String>,
}

/// Split non-blank, non-`#` lines on tabs. Every row needs at least
/// `min_fields` non-empty fields.
pub fn parse_rows(text: &str, min_fields: usize) -> Result<Vec<Row>, LoadError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(|f| f.trim().to_string()).collect();
        if fields.len() < min_fields || fields[..min_fields].iter().any(String::is_empty) {
            return Err(LoadError::Malformed { line: i + 1, message: format!("expected {min_fields} tab-separated fields") });
        }
        rows.push(Row { line: i + 1, fields });
    }
    Ok(rows)
}

/// A phrase found in a token sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseMatch {
    /// Token range `[start, end)`.
    pub start: usize,
    pub end: usize,
    /// Index of the phrase in the lexicon.
    pub entry: usize,
}

/// Weighted multi-word terms matched on token stems.
#[derive(Debug, Clone, Default)]
pub struct PhraseLexicon {
    entries: Vec<(String, f64)>,
    by_stems: HashMap<Vec<String>, usize>,
    max_len: usize,
}

impl PhraseLexicon {
    /// Parse `term<TAB>weight` lines.
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let mut terms = Vec::new();
        for row in parse_rows(text, 2)? {
            let weight: f64 = row.fields[1].parse().map_err(|_| LoadError::Malformed {
                line: row.line,
                message: format!("weight {:?} is not a number", row.fields[1]),
            })?;
            if !weight.is_finite() || weight < 0.0 {
                return Err(LoadError::Malformed { line: row.line, message: "weight must be non-negative".into() });
            }
            terms.push((row.fields[0].clone(), weight));
        }
        Ok(Self::from_terms(terms))
    }

    /// Build from terms; a repeated term keeps its first weight.
    pub fn from_terms(terms: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut lexicon = Self::default();
        for (term, weight) in terms {
            let key: Vec<String> = tokenize(&term).iter().map(|t| stem(t)).collect();
            if key.is_empty() || lexicon.by_stems.contains_key(&key) {
                continue;
            }
            lexicon.max_len = lexicon.max_len.max(key.len());
            lexicon.by_stems.insert(key, lexicon.entries.len());
            lexicon.entries.push((term.to_lowercase(), weight));
        }
        lexicon
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn term(&self, entry: usize) -> &str {
        &self.entries[entry].0
    }

    pub fn weight(&self, entry: usize) -> f64 {
        self.entries[entry].1
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(t, w)| (t.as_str(), *w))
    }

    /// Copy with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut copy = self.clone();
        for entry in &mut copy.entries {
            entry.1 *= factor;
        }
        copy
    }

    pub fn contains(&self, phrase: &str) -> bool {
        let key: Vec<String> = tokenize(phrase).iter().map(|t| stem(t)).collect();
        self.by_stems.contains_key(&key)
    }

    /// Non-overlapping matches, scanning left to right and taking the
    /// longest phrase at each position. `tokens` must be lowercase.
    pub fn find(&self, tokens: &[String]) -> Vec<PhraseMatch> {
        let stems: Vec<String> = tokens.iter().map(|t| stem(t)).collect();
        let mut found = Vec::new();
        let mut i = 0;
        while i < stems.len() {
            let longest = (1..=self.max_len.min(stems.len() - i))
                .rev()
                .find_map(|len| self.by_stems.get(&stems[i..i + len]).map(|&e| (len, e)));
            match longest {
                Some((len, entry)) => {
                    found.push(PhraseMatch { start: i, end: i + len, entry });
                    i += len;
                }
                None => i += 1,
            }
        }
        found
    }

    /// Sum of weights over `find`.
    pub fn score(&self, tokens: &[String]) -> f64 {
        self.find(tokens).iter().map(|m| self.weight(m.entry)).sum()
    }
}
