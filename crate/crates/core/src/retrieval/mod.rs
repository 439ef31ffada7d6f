//! Local search backends and option selection.

mod recipes;
mod selection;
mod tasks;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diy::QueryKind;
use crate::recipe::AttemptKind;

pub use recipes::{execute_recipe_plan, execute_recipe_plan_with, search_recipes, PlanOutcome, RecipeIndex};
pub use selection::{levenshtein, match_selection, normalized_distance, Selection, DEFAULT_CONFIRM_THRESHOLD};
pub use tasks::{retrieve_diy, retrieve_with_queries, search_tasks, TaskIndex, BM25_B, BM25_K1, MUST_TITLE_BONUS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RetrievalError {
    #[error("query has no must terms")]
    EmptyMust,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResultSource {
    Query(QueryKind),
    Attempt(AttemptKind),
    /// A direct constraint search outside a plan.
    Constraints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub doc_id: String,
    pub score: f64,
    pub source: ResultSource,
}

/// Score descending, then id ascending.
pub fn sort_ranked(results: &mut [RankedResult]) {
    results.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.doc_id.cmp(&b.doc_id)));
}
