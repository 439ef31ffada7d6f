//! Response generators. Each one proposes a candidate reply plus the state
//! change that should happen if that reply is chosen.

mod content;
mod facts;
mod launch;
mod social;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{RecipeDocument, TaskDocument};
use crate::state::{DialoguePhase, DocKind, DocRef, QaPair, ResponderId, TaskSession};
use crate::text::truncate_chars;

pub(crate) use content::alternative_options;
pub use content::{
    confirm_selection, navigation_response, present_options, render_ingredients, render_step, represent_options, start_task,
    OptionsConfig, INGREDIENT_CHUNK,
};
pub use facts::{fun_fact_lookup, parse_fun_facts, FunFact, FunFactIndex, DEFAULT_FUN_FACT_THRESHOLD};
pub use launch::{conversational_prompt_for_task, launch_greeting, recommend, MAX_PROMPT_CHARS, RECOMMENDATION_COUNT};
pub use social::{detect_topic, social_chat, PersonaConfig, SocialTemplates, SocialTopic, DEFAULT_PERSONA};

/// Speech-length budget for any single reply.
pub const MAX_RESPONSE_CHARS: usize = 600;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("the launch greeting is only for the first turn")]
    NotFirstTurn,
    #[error("task name is empty")]
    EmptyTaskName,
    #[error("task name longer than {MAX_PROMPT_CHARS} characters")]
    TaskNameTooLong,
    #[error("{0} has no ingredient list")]
    NotARecipe(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCandidate {
    pub text: String,
    pub responder_id: ResponderId,
    /// Ranking tier; lower wins. Filled in from the ranker's tier table.
    pub tier: u32,
    pub confidence: f64,
}

impl ResponseCandidate {
    /// A candidate with its text cut to the speech budget.
    pub fn new(responder_id: ResponderId, text: impl Into<String>, confidence: f64) -> Self {
        let text = truncate_chars(text.into().trim(), MAX_RESPONSE_CHARS);
        debug_assert!(!text.is_empty(), "{responder_id} produced an empty reply");
        Self { text, responder_id, tier: 0, confidence: confidence.clamp(0.0, 1.0) }
    }
}

/// What applying a winning candidate does to the conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StateEffect {
    None,
    SocialTurn,
    /// Options were read out; the user now chooses among them.
    PresentOptions {
        options: Vec<DocRef>,
    },
    /// Like `PresentOptions`, and the options join the already-recommended set.
    Recommend {
        options: Vec<DocRef>,
    },
    Confirm {
        option: DocRef,
    },
    StartTask(TaskSession),
    Navigate(TaskSession),
    CompleteTask,
    QaExchange(QaPair),
    End,
}

impl StateEffect {
    /// Phase after the effect, from `phase` before it.
    pub fn phase_after(&self, phase: DialoguePhase) -> DialoguePhase {
        match self {
            StateEffect::PresentOptions { .. } | StateEffect::Recommend { .. } | StateEffect::Confirm { .. } => {
                DialoguePhase::Selection
            }
            StateEffect::StartTask(_) | StateEffect::Navigate(_) => DialoguePhase::Completion,
            StateEffect::CompleteTask | StateEffect::End => DialoguePhase::Ended,
            StateEffect::None | StateEffect::SocialTurn | StateEffect::QaExchange(_) => phase,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub candidate: ResponseCandidate,
    pub effect: StateEffect,
}

impl Proposal {
    pub fn say(responder_id: ResponderId, text: impl Into<String>, confidence: f64) -> Self {
        Self { candidate: ResponseCandidate::new(responder_id, text, confidence), effect: StateEffect::None }
    }

    pub fn with_effect(mut self, effect: StateEffect) -> Self {
        self.effect = effect;
        self
    }
}

/// A corpus document of either kind.
#[derive(Debug, Clone, Copy)]
pub enum DocView<'a> {
    Task(&'a TaskDocument),
    Recipe(&'a RecipeDocument),
}

impl<'a> DocView<'a> {
    pub fn kind(self) -> DocKind {
        match self {
            DocView::Task(_) => DocKind::Task,
            DocView::Recipe(_) => DocKind::Recipe,
        }
    }

    pub fn id(self) -> &'a str {
        match self {
            DocView::Task(t) => &t.id,
            DocView::Recipe(r) => &r.id,
        }
    }

    pub fn doc_ref(self) -> DocRef {
        DocRef { kind: self.kind(), id: self.id().to_string() }
    }

    /// Name used when offering or referring to the document.
    pub fn title(self) -> &'a str {
        match self {
            DocView::Task(t) => t.display_name(),
            DocView::Recipe(r) => &r.name,
        }
    }

    pub fn steps(self) -> &'a [String] {
        match self {
            DocView::Task(t) => &t.steps,
            DocView::Recipe(r) => &r.steps,
        }
    }

    pub fn popularity(self) -> u32 {
        match self {
            DocView::Task(t) => t.popularity,
            DocView::Recipe(r) => r.popularity,
        }
    }

    /// Steps and ingredients flattened into one passage for question answering.
    pub fn context_text(self) -> String {
        let mut parts = Vec::new();
        if let DocView::Recipe(r) = self {
            let items: Vec<String> = r.ingredients.iter().map(|i| ingredient_phrase(&i.quantity, &i.name)).collect();
            parts.push(format!("Ingredients: {}.", items.join(", ")));
        }
        if let DocView::Task(t) = self {
            if !t.tools.is_empty() {
                parts.push(format!("Tools: {}.", t.tools.join(", ")));
            }
        }
        parts.extend(self.steps().iter().cloned());
        parts.join("\n")
    }
}

pub(crate) fn ingredient_phrase(quantity: &str, name: &str) -> String {
    match quantity.trim() {
        "" => name.to_string(),
        q => format!("{q} {name}"),
    }
}

/// "a", "a and b", "a, b, and c".
pub(crate) fn spoken_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [head @ .., last] => format!("{}, and {last}", head.join(", ")),
    }
}

pub fn elicitation() -> Proposal {
    Proposal::say(
        ResponderId::Elicitation,
        "I'd love to help you make or fix something. Would you like to find a recipe or a DIY project?",
        0.6,
    )
}

pub fn deflection() -> Proposal {
    Proposal::say(
        ResponderId::Deflection,
        "Sorry, that's not something I can help with. I'm best with cooking and DIY projects. \
         Would you like to try a recipe or a home project instead?",
        1.0,
    )
}

/// Fixed reply when a new task is requested after one has started.
pub fn changing_task(current_title: &str) -> Proposal {
    Proposal::say(
        ResponderId::ChangingTask,
        format!(
            "We've already started {current_title}, and I can't switch to a different task in the middle. \
             Say next to keep going, or say stop to end this task."
        ),
        1.0,
    )
}

pub fn help(phase: DialoguePhase) -> Proposal {
    let text = match phase {
        DialoguePhase::Selection => {
            "You can pick an option by saying its name or its number, like \"the first one\". \
             You can also ask for something different. Which one would you like?"
        }
        DialoguePhase::Completion => {
            "You can say next, previous, or repeat, or go to a step by number. For recipes, say show ingredients. \
             You can also ask me questions about the task."
        }
        DialoguePhase::Initialization | DialoguePhase::Ended => {
            "You can ask me for a recipe, like \"I want to make lemon pie\", or a DIY project, like \
             \"how to paint a room\". You can also ask me for recommendations. What would you like to do?"
        }
    };
    Proposal::say(ResponderId::Help, text, 1.0)
}

pub fn stop() -> Proposal {
    Proposal::say(
        ResponderId::Stop,
        "Okay, let's stop here. Thanks for spending time with me, and good luck with your project!",
        1.0,
    )
    .with_effect(StateEffect::End)
}

pub fn fallback(phase: DialoguePhase) -> Proposal {
    let text = match phase {
        DialoguePhase::Selection => "Sorry, I didn't catch which one you meant. You can say the name or the number of an option.",
        DialoguePhase::Completion => {
            "Sorry, I didn't catch that. You can say next, previous, or repeat, or ask me a question about this step."
        }
        DialoguePhase::Initialization | DialoguePhase::Ended => {
            "Sorry, I didn't catch that. Would you like to find a recipe or a DIY project?"
        }
    };
    Proposal::say(ResponderId::Fallback, text, 0.1)
}
