//! Heuristic entailment: IDF-weighted overlap of content stems, where a
//! remedy verb in the hypothesis counts as matching its problem term in the
//! premise.

use std::collections::HashMap;

use thiserror::Error;

use crate::corpus::TaskDocument;
use crate::provider::{with_fallback, Provider, Scored};
use crate::resources::Knowledge;
use crate::text::{normalize, stems};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntailmentError {
    #[error("premise is empty")]
    EmptyPremise,
    #[error("hypothesis is empty")]
    EmptyHypothesis,
}

/// Inverse document frequency over stems, `ln((N + 1) / (df + 1)) + 1`.
#[derive(Debug, Clone, Default)]
pub struct IdfTable {
    docs: usize,
    df: HashMap<String, usize>,
}

impl IdfTable {
    pub fn from_tasks(tasks: &[TaskDocument]) -> Self {
        let mut df: HashMap<String, usize> = HashMap::new();
        for task in tasks {
            let mut text = task.title.clone();
            for step in &task.steps {
                text.push(' ');
                text.push_str(step);
            }
            let mut seen: Vec<String> = stems(&text);
            seen.sort();
            seen.dedup();
            for s in seen {
                *df.entry(s).or_default() += 1;
            }
        }
        Self { docs: tasks.len(), df }
    }

    /// Unseen stems get the maximum weight.
    pub fn idf(&self, stem: &str) -> f64 {
        let df = self.df.get(stem).copied().unwrap_or(0);
        ((self.docs as f64 + 1.0) / (df as f64 + 1.0)).ln() + 1.0
    }
}

/// Score in `[0, 1]` that `hypothesis` follows from `premise`.
pub fn heuristic_entailment(kb: &Knowledge, premise: &str, hypothesis: &str) -> Result<f64, EntailmentError> {
    if premise.trim().is_empty() {
        return Err(EntailmentError::EmptyPremise);
    }
    if hypothesis.trim().is_empty() {
        return Err(EntailmentError::EmptyHypothesis);
    }
    if normalize(premise) == normalize(hypothesis) {
        return Ok(1.0);
    }
    let premise_stems = kb.stopwords.content_stems(premise);
    let hypothesis_stems = kb.stopwords.content_stems(hypothesis);
    let remedies: Vec<Vec<String>> = premise_stems.iter().map(|p| kb.commonsense.remedy_stems(p)).collect();

    let mut matched = 0.0;
    let mut union = 0.0;
    for h in &hypothesis_stems {
        let w = kb.idf.idf(h);
        union += w;
        if premise_stems.contains(h) || remedies.iter().any(|r| r.contains(h)) {
            matched += w;
        }
    }
    for (p, remedy) in premise_stems.iter().zip(&remedies) {
        let covered = hypothesis_stems.contains(p) || remedy.iter().any(|r| hypothesis_stems.contains(r));
        if !covered {
            union += kb.idf.idf(p);
        }
    }
    Ok(if union == 0.0 { 0.0 } else { matched / union })
}

/// Entailment through `provider`, falling back to the heuristic.
pub fn entailment_score(
    kb: &Knowledge,
    premise: &str,
    hypothesis: &str,
    provider: &Provider,
) -> Result<Scored<f64>, EntailmentError> {
    let local = heuristic_entailment(kb, premise, hypothesis)?;
    Ok(with_fallback(provider, |remote| remote.scores(premise, &[hypothesis.to_string()]).map(|s| s[0]), || local))
}
