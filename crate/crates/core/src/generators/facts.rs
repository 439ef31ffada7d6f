//! TF-IDF lookup of fun facts related to a step.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::lexicon::{parse_rows, LoadError};
use crate::text::{stem, Stopwords};

pub const DEFAULT_FUN_FACT_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunFact {
    pub topic_terms: Vec<String>,
    pub text: String,
}

/// Parse `topic,terms<TAB>fact text` lines.
pub fn parse_fun_facts(text: &str) -> Result<Vec<FunFact>, LoadError> {
    parse_rows(text, 2)?
        .into_iter()
        .map(|row| {
            let topic_terms: Vec<String> =
                row.fields[0].split(',').map(|t| t.trim().to_lowercase()).filter(|t| !t.is_empty()).collect();
            if topic_terms.is_empty() {
                return Err(LoadError::Malformed { line: row.line, message: "fun fact without topic terms".into() });
            }
            if row.fields[1].trim().is_empty() {
                return Err(LoadError::Malformed { line: row.line, message: "empty fun fact".into() });
            }
            Ok(FunFact { topic_terms, text: row.fields[1].trim().to_string() })
        })
        .collect()
}

type Vector = HashMap<String, f64>;

/// TF-IDF vectors over the facts. Each fact is indexed by its topic terms
/// together with its text, with raw term counts and smoothed idf
/// `ln((1 + N) / (1 + df)) + 1`; vectors are L2-normalized.
#[derive(Debug, Clone, Default)]
pub struct FunFactIndex {
    facts: Vec<FunFact>,
    vectors: Vec<Vector>,
    idf: HashMap<String, f64>,
    stopwords: Stopwords,
}

fn term_counts(stopwords: &Stopwords, text: &str) -> HashMap<String, f64> {
    let mut counts = HashMap::new();
    for token in stopwords.content_tokens(text) {
        *counts.entry(stem(&token)).or_insert(0.0) += 1.0;
    }
    counts
}

fn normalized(mut v: Vector) -> Vector {
    let norm = v.values().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.values_mut() {
            *x /= norm;
        }
    }
    v
}

impl FunFactIndex {
    pub fn build(facts: Vec<FunFact>, stopwords: &Stopwords) -> Self {
        let counts: Vec<HashMap<String, f64>> =
            facts.iter().map(|f| term_counts(stopwords, &format!("{} {}", f.topic_terms.join(" "), f.text))).collect();
        let mut df: HashMap<String, usize> = HashMap::new();
        for c in &counts {
            for term in c.keys() {
                *df.entry(term.clone()).or_default() += 1;
            }
        }
        let n = facts.len() as f64;
        let idf: HashMap<String, f64> = df.into_iter().map(|(t, d)| (t, ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0)).collect();
        let vectors = counts
            .into_iter()
            .map(|c| {
                normalized(
                    c.into_iter()
                        .map(|(t, tf)| {
                            let w = tf * idf[&t];
                            (t, w)
                        })
                        .collect(),
                )
            })
            .collect();
        Self { facts, vectors, idf, stopwords: stopwords.clone() }
    }

    pub fn facts(&self) -> &[FunFact] {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Cosine similarity of `query` with every fact, in fact order.
    pub fn similarities(&self, query: &str) -> Vec<f64> {
        let query: Vector = normalized(
            term_counts(&self.stopwords, query)
                .into_iter()
                .filter_map(|(t, tf)| self.idf.get(&t).map(|idf| (t, tf * idf)))
                .collect(),
        );
        self.vectors.iter().map(|v| query.iter().map(|(t, w)| w * v.get(t).copied().unwrap_or(0.0)).sum()).collect()
    }
}

/// The most similar fact, if its cosine reaches `threshold`. Ties go to the
/// earlier fact.
pub fn fun_fact_lookup<'a>(query_text: &str, index: &'a FunFactIndex, threshold: f64) -> Option<&'a FunFact> {
    let mut best: Option<(usize, f64)> = None;
    for (i, score) in index.similarities(query_text).into_iter().enumerate() {
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    best.filter(|&(_, score)| score > 0.0 && score >= threshold).map(|(i, _)| &index.facts[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::Knowledge;

    fn index(lines: &str) -> FunFactIndex {
        FunFactIndex::build(parse_fun_facts(lines).unwrap(), &Knowledge::bundled().stopwords)
    }

    #[test]
    fn topic_terms_find_their_fact() {
        let kb = Knowledge::bundled();
        for fact in kb.fun_facts.facts() {
            let query = fact.topic_terms.join(" ");
            let found = fun_fact_lookup(&query, &kb.fun_facts, DEFAULT_FUN_FACT_THRESHOLD).unwrap();
            let sims = kb.fun_facts.similarities(&query);
            let max = sims.iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(kb.fun_facts.similarities(&query)[kb.fun_facts.facts().iter().position(|f| f == found).unwrap()], max);
        }
    }

    #[test]
    fn no_shared_terms_means_none() {
        let kb = Knowledge::bundled();
        assert_eq!(fun_fact_lookup("xylophone quantum", &kb.fun_facts, DEFAULT_FUN_FACT_THRESHOLD), None);
        assert_eq!(fun_fact_lookup("", &kb.fun_facts, 0.0), None);
    }

    #[test]
    fn eggs_step_gets_the_eggs_fact() {
        let idx = index("eggs\tEggs keep longer in the fridge.\nflour\tFlour comes from ground grain.\n");
        let fact = fun_fact_lookup("Crack two eggs into a bowl.", &idx, DEFAULT_FUN_FACT_THRESHOLD).unwrap();
        assert_eq!(fact.topic_terms, ["eggs"]);
    }

    #[test]
    fn rejects_missing_topics() {
        assert!(parse_fun_facts(" \tA fact.\n").is_err());
        assert!(parse_fun_facts("eggs\t \n").is_err());
    }
}
