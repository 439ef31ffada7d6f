//! Option lists, step-by-step task content and ingredient lists.

use serde::{Deserialize, Serialize};

use super::facts::{fun_fact_lookup, FunFactIndex};
use super::{
    ingredient_phrase, spoken_list, stop, DocView, GeneratorError, Proposal, ResponseCandidate, StateEffect, MAX_RESPONSE_CHARS,
};
use crate::dialogue::navigation::{apply_navigation, ContentKey, NavigationCommand};
use crate::resources::Knowledge;
use crate::retrieval::RankedResult;
use crate::state::{DocKind, DocRef, ResponderId, TaskSession};

/// Ingredients per spoken sentence.
pub const INGREDIENT_CHUNK: usize = 8;

const NAV_HINT: &str = " You can say next, previous, or repeat at any time.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptionsConfig {
    /// How many results are read out.
    pub presented: usize,
    /// Document ids offered when a search finds nothing.
    pub alternatives: Vec<String>,
}

impl Default for OptionsConfig {
    fn default() -> Self {
        Self { presented: 3, alternatives: vec!["task-plant-vegetable-garden".into(), "recipe-classic-lemon-pie".into()] }
    }
}

fn numbered(titles: &[&str]) -> String {
    titles.iter().enumerate().map(|(i, t)| format!("{}. {t}.", i + 1)).collect::<Vec<_>>().join(" ")
}

/// Read out up to `config.presented` results as a numbered list. With no
/// results, offer the configured alternatives instead.
pub fn present_options(kb: &Knowledge, kind: DocKind, results: &[RankedResult], config: &OptionsConfig) -> Proposal {
    let docs: Vec<DocView> =
        results.iter().filter_map(|r| kb.doc(&DocRef { kind, id: r.doc_id.clone() })).take(config.presented).collect();
    present_views(kb, &docs, config)
}

/// Read the current options out again, for when the user turns down a
/// confirmation.
pub fn represent_options(kb: &Knowledge, options: &[DocRef], config: &OptionsConfig) -> Proposal {
    let docs: Vec<DocView> = options.iter().filter_map(|r| kb.doc(r)).collect();
    present_views(kb, &docs, config)
}

fn present_views(kb: &Knowledge, docs: &[DocView], config: &OptionsConfig) -> Proposal {
    match docs {
        [] => alternative_options(kb, config),
        [only] => Proposal::say(ResponderId::ShowOptions, format!("I found {}. Would you like to try it?", only.title()), 0.8)
            .with_effect(StateEffect::PresentOptions { options: vec![only.doc_ref()] }),
        many => {
            let titles: Vec<&str> = many.iter().map(|d| d.title()).collect();
            let text = format!(
                "Here's what I found. {} Which one would you like? You can say its name or its number.",
                numbered(&titles)
            );
            Proposal::say(ResponderId::ShowOptions, text, 0.8)
                .with_effect(StateEffect::PresentOptions { options: many.iter().map(|d| d.doc_ref()).collect() })
        }
    }
}

/// The pre-defined fallback suggestions.
pub(crate) fn alternative_options(kb: &Knowledge, config: &OptionsConfig) -> Proposal {
    let docs: Vec<DocView> = config.alternatives.iter().filter_map(|id| kb.find_doc(id)).collect();
    if docs.is_empty() {
        return Proposal::say(
            ResponderId::AlternativeOptions,
            "Sorry, I couldn't find anything for that. Could you try asking another way?",
            0.5,
        );
    }
    let titles: Vec<&str> = docs.iter().map(|d| d.title()).collect();
    let text = format!(
        "Sorry, I couldn't find a match for that. Here are some other ideas. {} Which one would you like?",
        numbered(&titles)
    );
    Proposal::say(ResponderId::AlternativeOptions, text, 0.5)
        .with_effect(StateEffect::PresentOptions { options: docs.iter().map(|d| d.doc_ref()).collect() })
}

pub fn confirm_selection(doc: DocView) -> Proposal {
    Proposal::say(ResponderId::ConfirmSelection, format!("Did you mean {}?", doc.title()), 0.7)
        .with_effect(StateEffect::Confirm { option: doc.doc_ref() })
}

fn step_text(session: &TaskSession, doc: DocView, include_fun_fact: bool, facts: &FunFactIndex, threshold: f64) -> String {
    let steps = doc.steps();
    let number = session.step_index + 1;
    let base = format!("Step {number} of {}: {}", steps.len(), steps[session.step_index]);
    let hint = if number.is_multiple_of(3) { NAV_HINT } else { "" };
    let fact = include_fun_fact
        .then(|| fun_fact_lookup(&steps[session.step_index], facts, threshold))
        .flatten()
        .map(|f| format!(" Fun fact: {}", f.text))
        .unwrap_or_default();
    [format!("{base}{hint}{fact}"), format!("{base}{hint}")]
        .into_iter()
        .find(|t| t.chars().count() <= MAX_RESPONSE_CHARS)
        .unwrap_or(base)
}

/// "Step i of n: ..." with a navigation reminder on every third step and a
/// related fun fact when one is close enough.
pub fn render_step(
    session: &TaskSession,
    doc: DocView,
    include_fun_fact: bool,
    facts: &FunFactIndex,
    threshold: f64,
) -> ResponseCandidate {
    ResponseCandidate::new(ResponderId::TaskContent, step_text(session, doc, include_fun_fact, facts, threshold), 0.9)
}

fn ingredients_text(doc: DocView) -> Result<String, GeneratorError> {
    let DocView::Recipe(recipe) = doc else {
        return Err(GeneratorError::NotARecipe(doc.id().to_string()));
    };
    let items: Vec<String> = recipe.ingredients.iter().map(|i| ingredient_phrase(&i.quantity, &i.name)).collect();
    let sentences: Vec<String> = items
        .chunks(INGREDIENT_CHUNK)
        .enumerate()
        .map(|(i, chunk)| {
            let lead = if i == 0 { "You will need" } else { "You will also need" };
            format!("{lead}: {}.", spoken_list(chunk))
        })
        .collect();
    Ok(sentences.join(" "))
}

/// "You will need: 1 cup sugar, 3 eggs, and salt." Long lists are split into
/// sentences of at most eight items.
pub fn render_ingredients(doc: DocView) -> Result<ResponseCandidate, GeneratorError> {
    Ok(ResponseCandidate::new(ResponderId::Ingredients, ingredients_text(doc)?, 0.9))
}

/// Open a task on its first step; recipes also read the ingredients when
/// both fit in one reply.
pub fn start_task(doc: DocView, facts: &FunFactIndex, threshold: f64) -> Proposal {
    let session = TaskSession::start(&doc.doc_ref(), doc.steps().len());
    let first = step_text(&session, doc, true, facts, threshold);
    let plain_first = step_text(&session, doc, false, facts, threshold);
    let text = match doc {
        DocView::Recipe(_) => {
            let intro = format!("Great choice! Let's make {}.", doc.title());
            let ingredients = ingredients_text(doc).unwrap_or_default();
            [
                format!("{intro} {ingredients} {first}"),
                format!("{intro} {ingredients} {plain_first}"),
                format!("{intro} {plain_first} Say show ingredients any time to hear what you need."),
            ]
            .into_iter()
            .find(|t| t.chars().count() <= MAX_RESPONSE_CHARS)
            .unwrap_or_else(|| format!("{intro} {plain_first}"))
        }
        DocView::Task(_) => {
            let intro = format!("Great choice! Let's get started on {}.", doc.title());
            [format!("{intro} {first}")]
                .into_iter()
                .find(|t| t.chars().count() <= MAX_RESPONSE_CHARS)
                .unwrap_or_else(|| format!("{intro} {plain_first}"))
        }
    };
    Proposal::say(ResponderId::TaskContent, text, 0.9).with_effect(StateEffect::StartTask(session))
}

/// Apply a navigation command and describe the result.
pub fn navigation_response(
    doc: DocView,
    session: &TaskSession,
    command: NavigationCommand,
    facts: &FunFactIndex,
    threshold: f64,
) -> Proposal {
    let (next, key) = apply_navigation(session, command);
    let steps = doc.steps().len();
    match key {
        ContentKey::Step => {
            Proposal { candidate: render_step(&next, doc, true, facts, threshold), effect: StateEffect::Navigate(next) }
        }
        ContentKey::Ingredients => match render_ingredients(doc) {
            Ok(candidate) => Proposal { candidate, effect: StateEffect::None },
            Err(_) => no_ingredients(doc),
        },
        ContentKey::NoIngredientsForDiy => no_ingredients(doc),
        ContentKey::TaskCompleted => Proposal::say(
            ResponderId::TaskCompleted,
            format!("Congratulations, you've finished {}! Is there anything else you'd like to make or fix?", doc.title()),
            1.0,
        )
        .with_effect(StateEffect::CompleteTask),
        ContentKey::NoPreviousStep => Proposal::say(
            ResponderId::TaskContent,
            "Sorry, you're already on the first step. Say next when you're ready to continue.",
            0.9,
        ),
        ContentKey::StepOutOfRange { requested } => Proposal::say(
            ResponderId::TaskContent,
            format!(
                "Sorry, there's no step {requested}. {} has {steps} steps, and you're on step {}.",
                doc.title(),
                session.step_index + 1
            ),
            0.9,
        ),
        ContentKey::Stopped => stop(),
    }
}

fn no_ingredients(doc: DocView) -> Proposal {
    let tools = match doc {
        DocView::Task(t) if !t.tools.is_empty() => format!(" You will need these tools: {}.", spoken_list(&t.tools)),
        _ => String::new(),
    };
    Proposal::say(ResponderId::Ingredients, format!("This DIY project doesn't have an ingredient list.{tools}"), 0.9)
}
