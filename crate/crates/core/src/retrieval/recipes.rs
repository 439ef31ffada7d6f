//! Constraint search over recipes and ordered execution of a search plan.

use crate::corpus::RecipeDocument;
use crate::recipe::{AttemptKind, RecipeConstraints, RecipeQueryPlan};
use crate::text::{normalize, stems};

use super::{sort_ranked, RankedResult, ResultSource};

#[derive(Debug, Clone)]
struct IndexedRecipe {
    name: Vec<String>,
    ingredients: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Default)]
pub struct RecipeIndex {
    docs: Vec<RecipeDocument>,
    indexed: Vec<IndexedRecipe>,
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

fn same(a: &Option<String>, b: &str) -> bool {
    a.as_deref().is_some_and(|a| normalize(a) == normalize(b))
}

impl RecipeIndex {
    pub fn build(docs: Vec<RecipeDocument>) -> Self {
        let indexed = docs
            .iter()
            .map(|d| IndexedRecipe { name: stems(&d.name), ingredients: d.ingredients.iter().map(|i| stems(&i.name)).collect() })
            .collect();
        Self { docs, indexed }
    }

    pub fn docs(&self) -> &[RecipeDocument] {
        &self.docs
    }

    pub fn get(&self, id: &str) -> Option<&RecipeDocument> {
        self.docs.iter().find(|d| d.id == id)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

/// Recipes satisfying every set constraint.
///
/// Dish names match as a run of stemmed words inside the recipe name;
/// ingredients match a run inside some ingredient name; a negative
/// ingredient excludes a recipe if it appears in any ingredient or in the
/// name. Each satisfied constraint scores 1, plus 1 for every wanted
/// ingredient that also appears in the name.
pub fn search_recipes(constraints: &RecipeConstraints, index: &RecipeIndex) -> Vec<RankedResult> {
    search_recipes_as(constraints, index, None)
}

fn search_recipes_as(constraints: &RecipeConstraints, index: &RecipeIndex, attempt: Option<AttemptKind>) -> Vec<RankedResult> {
    if constraints.is_empty() {
        return Vec::new();
    }
    let dish = constraints.dish_name.as_deref().map(stems);
    let wanted: Vec<Vec<String>> = constraints.ingredients.iter().map(|i| stems(i)).collect();
    let unwanted: Vec<Vec<String>> = constraints.negative_ingredients.iter().map(|i| stems(i)).collect();

    let mut results = Vec::new();
    for (doc, indexed) in index.docs.iter().zip(&index.indexed) {
        let has_ingredient = |needle: &Vec<String>| indexed.ingredients.iter().any(|i| contains_run(i, needle));
        let mut score = 0.0;
        if let Some(dish) = &dish {
            if !contains_run(&indexed.name, dish) {
                continue;
            }
            score += 1.0;
        }
        if let Some(c) = &constraints.cuisine {
            if !same(&doc.cuisine, c) {
                continue;
            }
            score += 1.0;
        }
        if let Some(c) = &constraints.meal_course {
            if !same(&doc.meal_course, c) {
                continue;
            }
            score += 1.0;
        }
        if let Some(o) = &constraints.occasion {
            if !same(&doc.occasion, o) {
                continue;
            }
            score += 1.0;
        }
        if !wanted.iter().all(has_ingredient) {
            continue;
        }
        if unwanted.iter().any(|n| has_ingredient(n) || contains_run(&indexed.name, n)) {
            continue;
        }
        score += (wanted.len() + unwanted.len()) as f64;
        score += wanted.iter().filter(|w| contains_run(&indexed.name, w)).count() as f64;
        let source = match attempt {
            Some(kind) => ResultSource::Attempt(kind),
            None => ResultSource::Constraints,
        };
        results.push(RankedResult { doc_id: doc.id.clone(), score, source });
    }
    sort_ranked(&mut results);
    results
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub results: Vec<RankedResult>,
    /// The attempt that produced `results`, or `None` when all four failed.
    pub attempt_used: Option<AttemptKind>,
}

/// Run attempts in order until one returns results.
pub fn execute_recipe_plan(plan: &RecipeQueryPlan, index: &RecipeIndex) -> PlanOutcome {
    execute_recipe_plan_with(plan, |kind, constraints| search_recipes_as(constraints, index, Some(kind)))
}

/// `execute_recipe_plan` with an injected search, so callers can observe
/// which attempts actually ran. Skipped attempts never reach `search`.
pub fn execute_recipe_plan_with(
    plan: &RecipeQueryPlan,
    mut search: impl FnMut(AttemptKind, &RecipeConstraints) -> Vec<RankedResult>,
) -> PlanOutcome {
    for attempt in &plan.attempts {
        let Some(constraints) = &attempt.constraints else {
            continue;
        };
        let results = search(attempt.kind, constraints);
        if !results.is_empty() {
            return PlanOutcome { results, attempt_used: Some(attempt.kind) };
        }
    }
    PlanOutcome { results: Vec::new(), attempt_used: None }
}
