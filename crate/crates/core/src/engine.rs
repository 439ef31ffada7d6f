//! One turn end to end: understanding, routing, ranking and the state
//! update, plus the session-serialized front door used by the service and
//! the REPL.

use std::collections::HashMap;
use std::io::Write;
use std::ops::Deref;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Config, ConfigError, Providers, MAX_UTTERANCE_CHARS};
use crate::dialogue::{route, DialogueContext, RankerTiers, RoutingDecision};
use crate::diy::formulate_queries;
use crate::generators::StateEffect;
use crate::nlu::{
    classify_initiative, classify_intent, detect_domain, detect_question, Domain, InitiativeLevel, Intent, NluError,
};
use crate::recipe::{tag_cooking_entities, tag_dish_name};
use crate::resources::{Knowledge, ResourceError};
use crate::state::{AnnotationSet, Clock, ConversationState, DialoguePhase, ResponderId, StateError, SystemClock, Turn};
use crate::store::{check_session_id, MemoryStore, StateStore, StoreError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Resources(#[from] ResourceError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Error)]
pub enum ChatError {
    #[error("text is empty")]
    EmptyText,
    #[error("text is {chars} characters; the limit is {MAX_UTTERANCE_CHARS}")]
    TextTooLong { chars: usize },
    #[error("invalid session id {0:?}")]
    InvalidSessionId(String),
    #[error("state store failure: {0}")]
    Store(StoreError),
    #[error("turn would break the conversation state: {0}")]
    State(#[from] StateError),
}

impl ChatError {
    /// Whether the request itself was at fault, as opposed to the server.
    pub fn is_client_error(&self) -> bool {
        matches!(self, ChatError::EmptyText | ChatError::TextTooLong { .. } | ChatError::InvalidSessionId(_))
    }
}

impl From<NluError> for ChatError {
    fn from(_: NluError) -> Self {
        ChatError::EmptyText
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub session_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionItem {
    /// 1-based, matching the spoken list.
    pub index: usize,
    pub title: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepInfo {
    /// 1-based.
    pub index: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub session_id: String,
    pub reply_text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<OptionItem>,
    pub phase: DialoguePhase,
    pub responder_id: ResponderId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<StepInfo>,
}

/// One line of the turn log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnLogRecord {
    pub session_id: String,
    pub turn_index: usize,
    pub phase: DialoguePhase,
    pub initiative: InitiativeLevel,
    pub intent: Intent,
    pub responder_id: ResponderId,
    pub latency_ms: u64,
}

/// Bundled or loaded knowledge.
#[derive(Debug, Clone)]
enum Kb {
    Bundled(&'static Knowledge),
    Loaded(Arc<Knowledge>),
}

impl Deref for Kb {
    type Target = Knowledge;

    fn deref(&self) -> &Knowledge {
        match self {
            Kb::Bundled(kb) => kb,
            Kb::Loaded(kb) => kb,
        }
    }
}

/// What one turn produced.
#[derive(Debug, Clone)]
pub struct TurnOutcome {
    pub state: ConversationState,
    pub turn: Turn,
    pub decision: RoutingDecision,
}

/// The stateless turn function: a state and an utterance in, the next state
/// out. Shareable across threads.
#[derive(Debug, Clone)]
pub struct Pipeline {
    kb: Kb,
    config: Config,
    tiers: RankerTiers,
    providers: Providers,
}

impl Pipeline {
    pub fn new(config: Config) -> Result<Self, EngineError> {
        config.validate()?;
        let kb = match &config.corpus_dir {
            Some(dir) => Kb::Loaded(Arc::new(Knowledge::load(Some(dir))?)),
            None => Kb::Bundled(Knowledge::bundled()),
        };
        let tiers = config.tiers().map_err(ConfigError::from)?;
        let providers = config.providers.build();
        Ok(Self { kb, config, tiers, providers })
    }

    pub fn knowledge(&self) -> &Knowledge {
        &self.kb
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    fn context(&self) -> DialogueContext<'_> {
        DialogueContext { kb: &self.kb, config: &self.config, tiers: &self.tiers, providers: &self.providers }
    }

    /// Domain, intent, initiative and question flags, plus entities for
    /// cooking turns and roles for DIY turns.
    pub fn annotate(&self, state: &ConversationState, utterance: &str) -> Result<AnnotationSet, NluError> {
        let kb = &*self.kb;
        let domain = detect_domain(utterance, &kb.domains, &self.providers.domain, self.config.thresholds.domain)?;
        let intent = classify_intent(kb, utterance, state);
        let initiative = classify_initiative(&domain, intent, utterance);
        let (is_question, question_confidence) = detect_question(utterance);
        let mut entities = Vec::new();
        let mut roles = None;
        match domain.chosen {
            Domain::Cooking => {
                entities = tag_dish_name(kb, utterance);
                entities.extend(tag_cooking_entities(kb, utterance));
            }
            Domain::Diy => roles = formulate_queries(kb, utterance).ok().and_then(|f| f.roles.ok()),
            _ => {}
        }
        Ok(AnnotationSet { domain, intent, initiative, is_question, question_confidence, entities, roles })
    }

    /// Run one turn. `state` is not modified.
    pub fn turn(&self, state: &ConversationState, utterance: &str, timestamp: u64) -> Result<TurnOutcome, ChatError> {
        let utterance = utterance.trim();
        if utterance.is_empty() {
            return Err(ChatError::EmptyText);
        }
        let chars = utterance.chars().count();
        if chars > MAX_UTTERANCE_CHARS {
            return Err(ChatError::TextTooLong { chars });
        }
        let annotations = self.annotate(state, utterance)?;
        let decision = route(self.context(), state, &annotations, utterance);
        let winner = decision.winning().clone();
        let turn = Turn {
            index: state.turns.len(),
            user_text: utterance.to_string(),
            bot_text: winner.candidate.text.clone(),
            annotations,
            responder_id: winner.candidate.responder_id,
            phase: decision.phase_after,
            timestamp,
        };
        let mut next = state.append_turn(turn.clone())?;
        next.phase = decision.phase_after;
        apply_effect(&mut next, &winner.effect);
        next.validate()?;
        Ok(TurnOutcome { state: next, turn, decision })
    }

    /// The client view of a stored state's latest turn.
    pub fn response_for(&self, state: &ConversationState) -> Option<ChatResponse> {
        let turn = state.turns.last()?;
        let options = match (&state.candidate_options, state.phase) {
            (Some(options), DialoguePhase::Selection) => options
                .iter()
                .enumerate()
                .map(|(i, o)| OptionItem {
                    index: i + 1,
                    title: self.kb.doc(o).map(|d| d.title().to_string()).unwrap_or_else(|| o.id.clone()),
                })
                .collect(),
            _ => Vec::new(),
        };
        let step = state
            .task_session
            .as_ref()
            .filter(|_| state.phase == DialoguePhase::Completion)
            .map(|s| StepInfo { index: s.step_index + 1, total: s.step_count });
        Some(ChatResponse {
            session_id: state.session_id.clone(),
            reply_text: turn.bot_text.clone(),
            options,
            phase: state.phase,
            responder_id: turn.responder_id,
            step,
        })
    }
}

/// Carry the winning candidate's state change into `state`.
fn apply_effect(state: &mut ConversationState, effect: &StateEffect) {
    match effect {
        StateEffect::None => {}
        StateEffect::SocialTurn => state.social_chat_turns_used += 1,
        StateEffect::PresentOptions { options } => {
            state.candidate_options = Some(options.clone());
            state.pending_confirmation = None;
            state.task_session = None;
        }
        StateEffect::Recommend { options } => {
            state.candidate_options = Some(options.clone());
            state.pending_confirmation = None;
            state.task_session = None;
            state.recommended.extend(options.iter().cloned());
        }
        StateEffect::Confirm { option } => state.pending_confirmation = Some(option.clone()),
        StateEffect::StartTask(session) => {
            state.task_session = Some(session.clone());
            state.candidate_options = None;
            state.pending_confirmation = None;
            state.qa_history.clear();
        }
        StateEffect::Navigate(session) => state.task_session = Some(session.clone()),
        StateEffect::CompleteTask | StateEffect::End => {
            state.task_session = None;
            state.candidate_options = None;
            state.pending_confirmation = None;
            state.qa_history.clear();
        }
        StateEffect::QaExchange(pair) => state.qa_history.push(pair.clone()),
    }
}

/// Pipeline plus storage, per-session locking, timestamps and the turn log.
pub struct Engine {
    pipeline: Pipeline,
    store: Box<dyn StateStore>,
    clock: Box<dyn Clock>,
    log: Option<Mutex<Box<dyn Write + Send>>>,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine").field("pipeline", &self.pipeline).finish_non_exhaustive()
    }
}

impl Engine {
    pub fn new(pipeline: Pipeline, store: Box<dyn StateStore>) -> Self {
        Self { pipeline, store, clock: Box::new(SystemClock), log: None, locks: Mutex::new(HashMap::new()) }
    }

    /// An engine over an in-memory store.
    pub fn in_memory(config: Config) -> Result<Self, EngineError> {
        Ok(Self::new(Pipeline::new(config)?, Box::new(MemoryStore::new())))
    }

    pub fn with_clock(mut self, clock: impl Clock + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    /// Send one JSON line per turn to `sink`.
    pub fn with_log(mut self, sink: impl Write + Send + 'static) -> Self {
        self.log = Some(Mutex::new(Box::new(sink)));
        self
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    fn session_lock(&self, session_id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|p| p.into_inner());
        locks.entry(session_id.to_string()).or_default().clone()
    }

    /// Run a turn for `request.session_id`. The new state is written with a
    /// single put, so a failure anywhere leaves the stored state as it was.
    pub fn handle_chat(&self, request: &ChatRequest) -> Result<ChatResponse, ChatError> {
        if check_session_id(&request.session_id).is_err() {
            return Err(ChatError::InvalidSessionId(request.session_id.clone()));
        }
        let started = Instant::now();
        let lock = self.session_lock(&request.session_id);
        let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());

        let state = self
            .store
            .get_state(&request.session_id)
            .map_err(ChatError::Store)?
            .unwrap_or_else(|| ConversationState::new(request.session_id.clone()));
        let outcome = self.pipeline.turn(&state, &request.text, self.clock.now_ms())?;
        self.store.put_state(&request.session_id, &outcome.state).map_err(ChatError::Store)?;

        let record = TurnLogRecord {
            session_id: request.session_id.clone(),
            turn_index: outcome.turn.index,
            phase: outcome.turn.phase,
            initiative: outcome.turn.annotations.initiative,
            intent: outcome.turn.annotations.intent,
            responder_id: outcome.turn.responder_id,
            latency_ms: started.elapsed().as_millis() as u64,
        };
        self.write_log(&record);
        Ok(self.pipeline.response_for(&outcome.state).expect("a turn was just recorded"))
    }

    fn write_log(&self, record: &TurnLogRecord) {
        let Some(log) = &self.log else {
            return;
        };
        let mut sink = log.lock().unwrap_or_else(|p| p.into_inner());
        let line = serde_json::to_string(record).expect("log records serialize");
        if let Err(e) = writeln!(sink, "{line}").and_then(|_| sink.flush()) {
            log::warn!("could not write turn log: {e}");
        }
    }

    pub fn session_state(&self, session_id: &str) -> Result<Option<ConversationState>, ChatError> {
        if check_session_id(session_id).is_err() {
            return Err(ChatError::InvalidSessionId(session_id.to_string()));
        }
        self.store.get_state(session_id).map_err(ChatError::Store)
    }
}
