//! The per-session record every module reads and the engine alone writes.

use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diy::PredicateArgument;
use crate::nlu::{DomainPrediction, InitiativeLevel, Intent};
use crate::recipe::EntitySpan;

/// Hard ceiling on social-chat turns per conversation.
pub const MAX_SOCIAL_TURNS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DialoguePhase {
    Initialization,
    Selection,
    Completion,
    Ended,
}

impl DialoguePhase {
    pub const ALL: [DialoguePhase; 4] =
        [DialoguePhase::Initialization, DialoguePhase::Selection, DialoguePhase::Completion, DialoguePhase::Ended];

    /// The transition relation. Staying put is always allowed. Leaving
    /// `Ended` starts a new episode, either back at the start or straight into
    /// option selection when the opening turn already names a task.
    pub fn can_transition_to(self, next: DialoguePhase) -> bool {
        use DialoguePhase::*;
        self == next
            || next == Ended
            || matches!(
                (self, next),
                (Initialization, Selection) | (Selection, Completion) | (Ended, Initialization) | (Ended, Selection)
            )
    }

    pub fn name(self) -> &'static str {
        match self {
            DialoguePhase::Initialization => "Initialization",
            DialoguePhase::Selection => "Selection",
            DialoguePhase::Completion => "Completion",
            DialoguePhase::Ended => "Ended",
        }
    }
}

impl fmt::Display for DialoguePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every response generator the engine knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponderId {
    Launch,
    Recommender,
    SocialChat,
    Elicitation,
    ShowOptions,
    AlternativeOptions,
    ConfirmSelection,
    TaskContent,
    Ingredients,
    TaskCompleted,
    ChangingTask,
    Qa,
    Deflection,
    Help,
    Stop,
    Fallback,
}

impl ResponderId {
    pub const ALL: [ResponderId; 16] = [
        ResponderId::Launch,
        ResponderId::Recommender,
        ResponderId::SocialChat,
        ResponderId::Elicitation,
        ResponderId::ShowOptions,
        ResponderId::AlternativeOptions,
        ResponderId::ConfirmSelection,
        ResponderId::TaskContent,
        ResponderId::Ingredients,
        ResponderId::TaskCompleted,
        ResponderId::ChangingTask,
        ResponderId::Qa,
        ResponderId::Deflection,
        ResponderId::Help,
        ResponderId::Stop,
        ResponderId::Fallback,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResponderId::Launch => "launch",
            ResponderId::Recommender => "recommender",
            ResponderId::SocialChat => "social-chat",
            ResponderId::Elicitation => "elicitation",
            ResponderId::ShowOptions => "show-options",
            ResponderId::AlternativeOptions => "alternative-options",
            ResponderId::ConfirmSelection => "confirm-selection",
            ResponderId::TaskContent => "task-content",
            ResponderId::Ingredients => "ingredients",
            ResponderId::TaskCompleted => "task-completed",
            ResponderId::ChangingTask => "changing-task",
            ResponderId::Qa => "qa",
            ResponderId::Deflection => "deflection",
            ResponderId::Help => "help",
            ResponderId::Stop => "stop",
            ResponderId::Fallback => "fallback",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl fmt::Display for ResponderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DocKind {
    Task,
    Recipe,
}

/// A document in one of the two corpora.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DocRef {
    pub kind: DocKind,
    pub id: String,
}

impl DocRef {
    pub fn task(id: impl Into<String>) -> Self {
        Self { kind: DocKind::Task, id: id.into() }
    }

    pub fn recipe(id: impl Into<String>) -> Self {
        Self { kind: DocKind::Recipe, id: id.into() }
    }
}

/// Progress through the chosen document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSession {
    pub doc_id: String,
    pub doc_kind: DocKind,
    /// 0-based.
    pub step_index: usize,
    pub step_count: usize,
    pub started: bool,
    pub completed: bool,
}

impl TaskSession {
    pub fn start(doc: &DocRef, step_count: usize) -> Self {
        Self { doc_id: doc.id.clone(), doc_kind: doc.kind, step_index: 0, step_count, started: true, completed: false }
    }

    pub fn doc(&self) -> DocRef {
        DocRef { kind: self.doc_kind, id: self.doc_id.clone() }
    }

    pub fn is_last_step(&self) -> bool {
        self.step_index + 1 == self.step_count
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if self.step_count == 0 || self.step_index >= self.step_count {
            return Err(StateError::StepOutOfRange { step_index: self.step_index, step_count: self.step_count });
        }
        if self.completed && !self.is_last_step() {
            return Err(StateError::CompletedBeforeLastStep);
        }
        Ok(())
    }
}

/// Everything the understanding modules said about one user turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub domain: DomainPrediction,
    pub intent: Intent,
    pub initiative: InitiativeLevel,
    pub is_question: bool,
    pub question_confidence: f64,
    /// Dish names and cooking entities, filled for cooking utterances.
    pub entities: Vec<EntitySpan>,
    /// Predicate and object of the top how-to paraphrase, for DIY utterances.
    pub roles: Option<PredicateArgument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub index: usize,
    pub user_text: String,
    pub bot_text: String,
    pub annotations: AnnotationSet,
    pub responder_id: ResponderId,
    /// Phase once this turn was handled.
    pub phase: DialoguePhase,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPair {
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationState {
    pub session_id: String,
    pub turns: Vec<Turn>,
    pub phase: DialoguePhase,
    pub task_session: Option<TaskSession>,
    pub social_chat_turns_used: u32,
    /// Options in the order they were read out.
    pub candidate_options: Option<Vec<DocRef>>,
    pub pending_confirmation: Option<DocRef>,
    /// Everything the recommender has already offered.
    #[serde(default)]
    pub recommended: Vec<DocRef>,
    /// Questions answered during the current task.
    #[serde(default)]
    pub qa_history: Vec<QaPair>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("turn index {found} does not follow {expected} existing turns")]
    TurnIndex { expected: usize, found: usize },
    #[error("{used} social-chat turns exceed the limit of {MAX_SOCIAL_TURNS}")]
    SocialBudget { used: u32 },
    #[error("social-chat counter {counter} disagrees with {recorded} recorded social turns")]
    SocialCount { counter: u32, recorded: u32 },
    #[error("pending confirmation outside the selection phase")]
    PendingOutsideSelection,
    #[error("pending confirmation is not one of the presented options")]
    PendingNotAnOption,
    #[error("task session present in phase {0}")]
    SessionOutsideCompletion(DialoguePhase),
    #[error("completion phase without a task session")]
    CompletionWithoutSession,
    #[error("task session not started")]
    SessionNotStarted,
    #[error("step {step_index} outside a {step_count}-step document")]
    StepOutOfRange { step_index: usize, step_count: usize },
    #[error("task marked completed before its last step")]
    CompletedBeforeLastStep,
    #[error("illegal phase transition {from} -> {to}")]
    PhaseTransition { from: DialoguePhase, to: DialoguePhase },
    #[error("state phase {state} differs from the last turn's phase {turn}")]
    PhaseMismatch { state: DialoguePhase, turn: DialoguePhase },
    #[error("session id is empty")]
    EmptySessionId,
}

impl ConversationState {
    pub fn new(session_id: impl Into<String>) -> Self {
        Self {
            session_id: session_id.into(),
            turns: Vec::new(),
            phase: DialoguePhase::Initialization,
            task_session: None,
            social_chat_turns_used: 0,
            candidate_options: None,
            pending_confirmation: None,
            recommended: Vec::new(),
            qa_history: Vec::new(),
        }
    }

    /// Phase before the first turn or after the latest one.
    fn phase_before(&self, turn_index: usize) -> DialoguePhase {
        match turn_index {
            0 => DialoguePhase::Initialization,
            i => self.turns[i - 1].phase,
        }
    }

    /// Check every invariant, including that the recorded phases follow the
    /// transition relation turn by turn.
    pub fn validate(&self) -> Result<(), StateError> {
        if self.session_id.is_empty() {
            return Err(StateError::EmptySessionId);
        }
        for (i, turn) in self.turns.iter().enumerate() {
            if turn.index != i {
                return Err(StateError::TurnIndex { expected: i, found: turn.index });
            }
            let from = self.phase_before(i);
            if !from.can_transition_to(turn.phase) {
                return Err(StateError::PhaseTransition { from, to: turn.phase });
            }
        }
        if let Some(last) = self.turns.last() {
            if last.phase != self.phase {
                return Err(StateError::PhaseMismatch { state: self.phase, turn: last.phase });
            }
        } else if self.phase != DialoguePhase::Initialization {
            return Err(StateError::PhaseTransition { from: DialoguePhase::Initialization, to: self.phase });
        }

        if self.social_chat_turns_used > MAX_SOCIAL_TURNS {
            return Err(StateError::SocialBudget { used: self.social_chat_turns_used });
        }
        let recorded = self.turns.iter().filter(|t| t.responder_id == ResponderId::SocialChat).count() as u32;
        if recorded != self.social_chat_turns_used {
            return Err(StateError::SocialCount { counter: self.social_chat_turns_used, recorded });
        }

        if let Some(pending) = &self.pending_confirmation {
            if self.phase != DialoguePhase::Selection {
                return Err(StateError::PendingOutsideSelection);
            }
            if !self.candidate_options.as_ref().is_some_and(|o| o.contains(pending)) {
                return Err(StateError::PendingNotAnOption);
            }
        }

        match (&self.task_session, self.phase) {
            (Some(session), DialoguePhase::Completion) => {
                if !session.started {
                    return Err(StateError::SessionNotStarted);
                }
                session.validate()?;
            }
            (Some(_), phase) => return Err(StateError::SessionOutsideCompletion(phase)),
            (None, DialoguePhase::Completion) => return Err(StateError::CompletionWithoutSession),
            (None, _) => {}
        }
        Ok(())
    }

    /// A copy with `turn` appended. The receiver is left untouched.
    pub fn append_turn(&self, turn: Turn) -> Result<ConversationState, StateError> {
        let expected = self.turns.len();
        if turn.index != expected {
            return Err(StateError::TurnIndex { expected, found: turn.index });
        }
        let from = self.phase_before(expected);
        if !from.can_transition_to(turn.phase) {
            return Err(StateError::PhaseTransition { from, to: turn.phase });
        }
        let mut next = self.clone();
        next.turns.push(turn);
        Ok(next)
    }

    /// Copy with every turn timestamp zeroed, for comparisons that should
    /// ignore wall-clock time.
    pub fn without_timestamps(&self) -> ConversationState {
        let mut copy = self.clone();
        for turn in &mut copy.turns {
            turn.timestamp = 0;
        }
        copy
    }
}

/// Source of turn timestamps.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
    }
}

/// Always returns the same instant.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedClock(pub u64);

impl Clock for FixedClock {
    fn now_ms(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::nlu::{Domain, DomainPrediction};

    pub fn annotations() -> AnnotationSet {
        let mut scores = vec![0.0; Domain::ALL.len()];
        scores[Domain::ALL.len() - 1] = 1.0;
        AnnotationSet {
            domain: DomainPrediction::from_scores(scores, 0.5, false),
            intent: Intent::Chitchat,
            initiative: InitiativeLevel::Low,
            is_question: false,
            question_confidence: 0.0,
            entities: vec![],
            roles: None,
        }
    }

    pub fn turn(index: usize, phase: DialoguePhase) -> Turn {
        Turn {
            index,
            user_text: format!("user {index}"),
            bot_text: format!("bot {index}"),
            annotations: annotations(),
            responder_id: ResponderId::Fallback,
            phase,
            timestamp: 1_700_000_000_000 + index as u64,
        }
    }
}
