//! Cooking entity tagging and the ordered recipe search plan.

use serde::{Deserialize, Serialize};

use crate::lexicon::PhraseLexicon;
use crate::pos::{is_determiner, PosTag};
use crate::resources::Knowledge;
use crate::text::tokenize;

/// Tokens after a negation cue within which an ingredient becomes negative.
pub const NEGATION_WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    DishName,
    Ingredient,
    NegativeIngredient,
    Cuisine,
    MealCourse,
    Occasion,
}

impl EntityKind {
    pub fn name(self) -> &'static str {
        match self {
            EntityKind::DishName => "DishName",
            EntityKind::Ingredient => "Ingredient",
            EntityKind::NegativeIngredient => "NegativeIngredient",
            EntityKind::Cuisine => "Cuisine",
            EntityKind::MealCourse => "MealCourse",
            EntityKind::Occasion => "Occasion",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            EntityKind::DishName,
            EntityKind::Ingredient,
            EntityKind::NegativeIngredient,
            EntityKind::Cuisine,
            EntityKind::MealCourse,
            EntityKind::Occasion,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub kind: EntityKind,
    pub text: String,
    pub start_token: usize,
    /// Exclusive.
    pub end_token: usize,
    /// One IOB label per token of the span.
    pub iob_tags: Vec<String>,
}

impl EntitySpan {
    fn new(kind: EntityKind, tokens: &[String], start: usize, end: usize) -> Self {
        let iob_tags = (start..end).map(|i| format!("{}-{}", if i == start { "B" } else { "I" }, kind.name())).collect();
        Self { kind, text: tokens[start..end].join(" "), start_token: start, end_token: end, iob_tags }
    }
}

/// IOB labels for a whole sentence of `len` tokens. Spans must not overlap.
pub fn sentence_iob(len: usize, spans: &[EntitySpan]) -> Vec<String> {
    let mut tags = vec!["O".to_string(); len];
    for span in spans {
        for (offset, tag) in span.iob_tags.iter().enumerate() {
            tags[span.start_token + offset] = tag.clone();
        }
    }
    tags
}

/// The gazetteers behind the general tagger.
#[derive(Debug, Clone, Default)]
pub struct Gazetteers {
    pub dishes: PhraseLexicon,
    pub ingredients: PhraseLexicon,
    pub cuisines: PhraseLexicon,
    pub courses: PhraseLexicon,
    pub occasions: PhraseLexicon,
    /// Kind of each entry in `combined`.
    kinds: Vec<EntityKind>,
    combined: PhraseLexicon,
    negation_cues: PhraseLexicon,
}

impl Gazetteers {
    pub fn new(
        dishes: PhraseLexicon,
        ingredients: PhraseLexicon,
        cuisines: PhraseLexicon,
        courses: PhraseLexicon,
        occasions: PhraseLexicon,
        negation_cues: &[String],
    ) -> Self {
        let mut terms = Vec::new();
        let mut kinds = Vec::new();
        for (lexicon, kind) in [
            (&occasions, EntityKind::Occasion),
            (&courses, EntityKind::MealCourse),
            (&cuisines, EntityKind::Cuisine),
            (&ingredients, EntityKind::Ingredient),
        ] {
            for (term, weight) in lexicon.entries() {
                if !terms.iter().any(|(t, _): &(String, f64)| t == term) {
                    terms.push((term.to_string(), weight));
                    kinds.push(kind);
                }
            }
        }
        let combined = PhraseLexicon::from_terms(terms);
        let negation_cues = PhraseLexicon::from_terms(negation_cues.iter().map(|c| (c.clone(), 1.0)));
        Self { dishes, ingredients, cuisines, courses, occasions, kinds, combined, negation_cues }
    }
}

const DISH_VERBS: &[&str] = &["make", "cook", "bake", "prepare", "fix", "grill", "roast", "fry"];
const NOT_A_DISH: &[&str] = &["something", "anything", "food", "meal", "dish", "recipe", "recipes", "it", "one", "stuff"];

/// Dish names: longest gazetteer match, plus the noun phrase after a
/// cooking verb ("make <NP>") when the gazetteer has nothing there.
pub fn tag_dish_name(kb: &Knowledge, utterance: &str) -> Vec<EntitySpan> {
    let tokens = tokenize(utterance);
    let g = &kb.gazetteers;
    let mut spans: Vec<EntitySpan> =
        g.dishes.find(&tokens).into_iter().map(|m| EntitySpan::new(EntityKind::DishName, &tokens, m.start, m.end)).collect();

    let tags = kb.tagger.tag_tokens(&tokens);
    let cue_starts: Vec<usize> = g.negation_cues.find(&tokens).iter().map(|m| m.start).collect();
    for (v, verb) in tokens.iter().enumerate() {
        if !DISH_VERBS.contains(&verb.as_str()) {
            continue;
        }
        let mut start = v + 1;
        while start < tokens.len() && (is_determiner(&tokens[start]) || tokens[start] == "me" || tokens[start] == "us") {
            start += 1;
        }
        let mut end = start;
        while end < tokens.len()
            && end - start < 4
            && matches!(tags[end], PosTag::Noun | PosTag::Adjective)
            && !cue_starts.contains(&end)
            && !kb.stopwords.contains(&tokens[end])
            && !NOT_A_DISH.contains(&tokens[end].as_str())
            && !g.courses.contains(&tokens[end])
            && !g.occasions.contains(&tokens[end])
        {
            end += 1;
        }
        while end > start && tags[end - 1] != PosTag::Noun {
            end -= 1;
        }
        if end == start {
            continue;
        }
        // Longest match wins: a capture may swallow gazetteer spans it
        // contains, but never cuts one in half.
        let inside = |s: &EntitySpan| s.start_token >= start && s.end_token <= end;
        let crosses = spans.iter().any(|s| start < s.end_token && s.start_token < end && !inside(s));
        let longer = spans.iter().all(|s| !inside(s) || s.end_token - s.start_token < end - start);
        if !crosses && longer {
            spans.retain(|s| !inside(s));
            spans.push(EntitySpan::new(EntityKind::DishName, &tokens, start, end));
        }
    }
    spans.sort_by_key(|s| s.start_token);
    spans
}

/// Ingredients, cuisines, courses and occasions by gazetteer. An ingredient
/// starting within four tokens after a negation cue is negative.
pub fn tag_cooking_entities(kb: &Knowledge, utterance: &str) -> Vec<EntitySpan> {
    let tokens = tokenize(utterance);
    let g = &kb.gazetteers;
    let cue_ends: Vec<usize> = g.negation_cues.find(&tokens).iter().map(|m| m.end).collect();
    g.combined
        .find(&tokens)
        .into_iter()
        .map(|m| {
            let mut kind = g.kinds[m.entry];
            if kind == EntityKind::Ingredient && cue_ends.iter().any(|&c| m.start >= c && m.start < c + NEGATION_WINDOW) {
                kind = EntityKind::NegativeIngredient;
            }
            EntitySpan::new(kind, &tokens, m.start, m.end)
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeConstraints {
    pub dish_name: Option<String>,
    pub ingredients: Vec<String>,
    pub negative_ingredients: Vec<String>,
    pub cuisine: Option<String>,
    pub meal_course: Option<String>,
    pub occasion: Option<String>,
}

impl RecipeConstraints {
    pub fn is_empty(&self) -> bool {
        self.dish_name.is_none()
            && self.ingredients.is_empty()
            && self.negative_ingredients.is_empty()
            && self.cuisine.is_none()
            && self.meal_course.is_none()
            && self.occasion.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttemptKind {
    DishAsDish,
    DishAsCuisine,
    AllEntities,
    LastNounAsDish,
}

impl AttemptKind {
    pub const ORDER: [AttemptKind; 4] =
        [AttemptKind::DishAsDish, AttemptKind::DishAsCuisine, AttemptKind::AllEntities, AttemptKind::LastNounAsDish];

    /// 1-based position in the plan.
    pub fn number(self) -> u8 {
        match self {
            AttemptKind::DishAsDish => 1,
            AttemptKind::DishAsCuisine => 2,
            AttemptKind::AllEntities => 3,
            AttemptKind::LastNounAsDish => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedAttempt {
    pub kind: AttemptKind,
    /// `None` when the utterance gives this attempt nothing to search for.
    pub constraints: Option<RecipeConstraints>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeQueryPlan {
    pub attempts: [PlannedAttempt; 4],
}

/// The four attempts, always in the same order. Negative ingredients ride
/// along on every attempt so that no fallback can return an excluded item.
pub fn build_recipe_search_plan(
    kb: &Knowledge,
    dish_spans: &[EntitySpan],
    entity_spans: &[EntitySpan],
    utterance: &str,
) -> RecipeQueryPlan {
    let negatives: Vec<String> =
        entity_spans.iter().filter(|s| s.kind == EntityKind::NegativeIngredient).map(|s| s.text.clone()).collect();
    let with_negatives = |c: RecipeConstraints| RecipeConstraints { negative_ingredients: negatives.clone(), ..c };
    let dish = dish_spans.iter().find(|s| s.kind == EntityKind::DishName).map(|s| s.text.clone());

    let first_of = |kind: EntityKind| entity_spans.iter().find(|s| s.kind == kind).map(|s| s.text.clone());
    let all = RecipeConstraints {
        dish_name: None,
        ingredients: entity_spans.iter().filter(|s| s.kind == EntityKind::Ingredient).map(|s| s.text.clone()).collect(),
        negative_ingredients: negatives.clone(),
        cuisine: first_of(EntityKind::Cuisine),
        meal_course: first_of(EntityKind::MealCourse),
        occasion: first_of(EntityKind::Occasion),
    };

    let tokens = tokenize(utterance);
    let tags = kb.tagger.tag_tokens(&tokens);
    let negated = |i: usize| {
        entity_spans.iter().any(|s| s.kind == EntityKind::NegativeIngredient && (s.start_token..s.end_token).contains(&i))
    };
    let last_noun = (0..tokens.len())
        .rev()
        .find(|&i| tags[i] == PosTag::Noun && !negated(i) && !kb.stopwords.contains(&tokens[i]))
        .map(|i| tokens[i].clone());

    let attempts = [
        PlannedAttempt {
            kind: AttemptKind::DishAsDish,
            constraints: dish.clone().map(|d| with_negatives(RecipeConstraints { dish_name: Some(d), ..Default::default() })),
        },
        PlannedAttempt {
            kind: AttemptKind::DishAsCuisine,
            constraints: dish.map(|d| with_negatives(RecipeConstraints { cuisine: Some(d), ..Default::default() })),
        },
        PlannedAttempt { kind: AttemptKind::AllEntities, constraints: (!all.is_empty()).then_some(all) },
        PlannedAttempt {
            kind: AttemptKind::LastNounAsDish,
            constraints: last_noun.map(|n| with_negatives(RecipeConstraints { dish_name: Some(n), ..Default::default() })),
        },
    ];
    RecipeQueryPlan { attempts }
}
