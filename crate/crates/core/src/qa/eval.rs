//! Offline evaluation of the extractive answerer over a line-delimited JSON
//! set, reported per history length and per question type.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::{exact_match, fuzzy_match_score, token_f1};
use super::{extractive_answer, QaContext, QaError, QuestionType};
use crate::provider::Provider;
use crate::resources::Knowledge;
use crate::state::QaPair;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub context: String,
    #[serde(default)]
    pub history: Vec<QaPair>,
    pub question: String,
    pub answer: String,
    pub question_type: QuestionType,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Qa(#[from] QaError),
}

pub fn load_eval_records(text: &str) -> Result<Vec<EvalRecord>, EvalError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| EvalError::Parse { line: i + 1, source }))
        .collect()
}

/// Mean scores over a group of records. `question_type` is `None` for the
/// row covering every type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub k: usize,
    pub question_type: Option<QuestionType>,
    pub count: usize,
    pub fuzzy: f64,
    pub f1: f64,
    pub em: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub rows: Vec<MetricRow>,
}

#[derive(Default)]
struct Sums {
    count: usize,
    fuzzy: f64,
    f1: f64,
    em: f64,
}

impl Sums {
    fn add(&mut self, gold: &str, pred: &str) {
        self.count += 1;
        self.fuzzy += fuzzy_match_score(gold, pred);
        self.f1 += token_f1(gold, pred);
        self.em += f64::from(exact_match(gold, pred));
    }

    fn row(&self, k: usize, question_type: Option<QuestionType>) -> MetricRow {
        let n = self.count.max(1) as f64;
        MetricRow { k, question_type, count: self.count, fuzzy: self.fuzzy / n, f1: self.f1 / n, em: self.em / n }
    }
}

/// Answer every record once per `k` and average the three metrics. An
/// abstention counts as an empty prediction.
pub fn evaluate(
    kb: &Knowledge,
    records: &[EvalRecord],
    ks: &[usize],
    overlap_threshold: f64,
    provider: &Provider,
) -> Result<EvalReport, EvalError> {
    let mut rows = Vec::new();
    for &k in ks {
        let mut all = Sums::default();
        let mut by_type: BTreeMap<QuestionType, Sums> = BTreeMap::new();
        for record in records {
            let ctx = QaContext::new(record.context.clone(), record.history.clone(), record.question.clone(), k)?;
            let answer = extractive_answer(kb, &ctx, overlap_threshold, provider).value;
            let pred = if answer.is_unknown() { "" } else { answer.text.as_str() };
            all.add(&record.answer, pred);
            by_type.entry(record.question_type).or_default().add(&record.answer, pred);
        }
        rows.push(all.row(k, None));
        rows.extend(QuestionType::ALL.iter().filter_map(|t| by_type.get(t).map(|s| s.row(k, Some(*t)))));
    }
    Ok(EvalReport { rows })
}

impl EvalReport {
    /// Plain-text table, one line per row.
    pub fn render(&self) -> String {
        let mut out = format!("{:<4} {:<18} {:>5} {:>7} {:>6} {:>6}\n", "k", "type", "n", "fuzzy", "f1", "em");
        for r in &self.rows {
            let kind = r.question_type.map_or("all".to_string(), |t| format!("{t:?}"));
            let _ = writeln!(out, "{:<4} {:<18} {:>5} {:>7.2} {:>6.3} {:>6.3}", r.k, kind, r.count, r.fuzzy, r.f1, r.em);
        }
        out
    }
}
