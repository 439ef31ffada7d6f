//! The three-phase controller. Each turn, the router picks the generators
//! that fit the phase and the annotations, runs them, and the ranker picks
//! the single reply.

pub mod navigation;
mod ranker;

use crate::config::{Config, Providers};
use crate::generators::StateEffect;
use crate::generators::{
    alternative_options, changing_task, confirm_selection, deflection, elicitation, fallback, help, launch_greeting,
    navigation_response, present_options, recommend, represent_options, social_chat, start_task, stop, DocView, Proposal,
    ResponseCandidate, SocialTopic,
};
use crate::nlu::Domain;
use crate::nlu::{strip_politeness, InitiativeLevel, Intent};
use crate::qa::answer_question;
use crate::recipe::{build_recipe_search_plan, EntityKind, EntitySpan};
use crate::resources::Knowledge;
use crate::retrieval::{execute_recipe_plan, match_selection, retrieve_diy};
use crate::state::{AnnotationSet, ConversationState, DialoguePhase, DocKind, DocRef, QaPair, ResponderId};
use crate::text::tokenize;

pub use navigation::{apply_navigation, parse_navigation, ContentKey, NavigationCommand};
pub use ranker::{rank_responses, RankError, RankerTiers, TierError};

/// Everything the router reads besides the conversation itself.
#[derive(Debug, Clone, Copy)]
pub struct DialogueContext<'a> {
    pub kb: &'a Knowledge,
    pub config: &'a Config,
    pub tiers: &'a RankerTiers,
    pub providers: &'a Providers,
}

/// The generators chosen for a turn, what they proposed, and the winner.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingDecision {
    /// In the order they ran. Generators that abstained are still listed.
    pub selected_generators: Vec<ResponderId>,
    pub phase_after: DialoguePhase,
    pub proposals: Vec<Proposal>,
    /// Index into `proposals` of the ranked winner.
    pub winner: usize,
}

impl RoutingDecision {
    pub fn winning(&self) -> &Proposal {
        &self.proposals[self.winner]
    }
}

const LAUNCH_PHRASES: &[&str] = &[
    "let's chat",
    "lets chat",
    "start",
    "begin",
    "open",
    "launch",
    "let's start",
    "let's get started",
    "let's cook",
    "let's begin",
];

fn is_launch_phrase(utterance: &str) -> bool {
    let core = strip_politeness(&tokenize(utterance)).join(" ");
    LAUNCH_PHRASES.contains(&core.as_str()) || crate::generators::detect_topic(utterance) == SocialTopic::Greeting
}

struct Plan<'a> {
    ctx: DialogueContext<'a>,
    selected: Vec<ResponderId>,
    proposals: Vec<Proposal>,
}

impl Plan<'_> {
    fn add(&mut self, id: ResponderId, proposal: Option<Proposal>) {
        self.selected.push(id);
        if let Some(mut p) = proposal {
            self.ctx.tiers.assign(&mut p.candidate);
            self.proposals.push(p);
        }
    }
}

/// Route one annotated user turn and rank the results. Fallback always
/// runs, except for sensitive topics, where deflection is the only
/// generator.
pub fn route(ctx: DialogueContext, state: &ConversationState, annotations: &AnnotationSet, utterance: &str) -> RoutingDecision {
    let mut plan = Plan { ctx, selected: Vec::new(), proposals: Vec::new() };
    if annotations.domain.chosen.avoid() {
        plan.add(ResponderId::Deflection, Some(deflection()));
    } else {
        if annotations.intent == Intent::Stop {
            plan.add(ResponderId::Stop, Some(stop()));
        } else {
            match state.phase {
                DialoguePhase::Initialization | DialoguePhase::Ended => route_opening(&mut plan, state, annotations, utterance),
                DialoguePhase::Selection => route_selection(&mut plan, state, annotations, utterance),
                DialoguePhase::Completion => route_completion(&mut plan, state, annotations, utterance),
            }
            if annotations.is_question && !plan.selected.contains(&ResponderId::Qa) {
                let answer = qa(ctx, state, utterance);
                plan.add(ResponderId::Qa, answer);
            }
        }
        plan.add(ResponderId::Fallback, Some(fallback(state.phase)));
    }
    let candidates: Vec<ResponseCandidate> = plan.proposals.iter().map(|p| p.candidate.clone()).collect();
    let winner = rank_responses(&candidates).expect("fallback or deflection is always proposed");
    let phase_after = plan.proposals[winner].effect.phase_after(state.phase);
    RoutingDecision { selected_generators: plan.selected, phase_after, proposals: plan.proposals, winner }
}

fn retrieval(plan: &mut Plan, annotations: &AnnotationSet, utterance: &str) {
    let Plan { ctx, .. } = plan;
    let (kb, options) = (ctx.kb, &ctx.config.options);
    let proposal = match annotations.domain.chosen {
        Domain::Cooking => {
            let (dishes, others): (Vec<EntitySpan>, Vec<EntitySpan>) =
                annotations.entities.iter().cloned().partition(|s| s.kind == EntityKind::DishName);
            let search = build_recipe_search_plan(kb, &dishes, &others, utterance);
            let outcome = execute_recipe_plan(&search, &kb.recipes);
            present_options(kb, DocKind::Recipe, &outcome.results, options)
        }
        _ => present_options(kb, DocKind::Task, &retrieve_diy(kb, utterance, &kb.tasks), options),
    };
    let id = proposal.candidate.responder_id;
    plan.add(id, Some(proposal));
}

fn recommender(plan: &mut Plan, state: &ConversationState, annotations: &AnnotationSet) {
    let ctx = plan.ctx;
    let domain = Some(annotations.domain.chosen).filter(|d| d.is_task_domain());
    let p = recommend(ctx.kb, domain, state, &ctx.providers.generative, &ctx.config.options);
    plan.add(ResponderId::Recommender, Some(p));
}

fn social_or_elicitation(plan: &mut Plan, state: &ConversationState, utterance: &str) {
    let ctx = plan.ctx;
    match social_chat(utterance, state, &ctx.config.persona, &ctx.kb.social) {
        Some(p) => plan.add(ResponderId::SocialChat, Some(p)),
        None => plan.add(ResponderId::Elicitation, Some(elicitation())),
    }
}

fn route_opening(plan: &mut Plan, state: &ConversationState, annotations: &AnnotationSet, utterance: &str) {
    if state.turns.is_empty() && annotations.initiative == InitiativeLevel::Low && is_launch_phrase(utterance) {
        plan.add(ResponderId::Launch, launch_greeting(plan.ctx.kb, state).ok());
        return;
    }
    match annotations.initiative {
        InitiativeLevel::High => retrieval(plan, annotations, utterance),
        InitiativeLevel::RecommendationRequest => recommender(plan, state, annotations),
        InitiativeLevel::Low => social_or_elicitation(plan, state, utterance),
    }
}

fn start(plan: &mut Plan, doc: DocRef) {
    let ctx = plan.ctx;
    let proposal = ctx.kb.doc(&doc).map(|d| start_task(d, &ctx.kb.fun_facts, ctx.config.thresholds.fun_fact));
    plan.add(ResponderId::TaskContent, proposal);
}

fn route_selection(plan: &mut Plan, state: &ConversationState, annotations: &AnnotationSet, utterance: &str) {
    let ctx = plan.ctx;
    let options = state.candidate_options.clone().unwrap_or_default();
    if let Some(pending) = &state.pending_confirmation {
        match annotations.intent {
            Intent::Affirm => return start(plan, pending.clone()),
            Intent::Deny => {
                plan.add(ResponderId::ShowOptions, Some(represent_options(ctx.kb, &options, &ctx.config.options)));
                return;
            }
            // A fresh request instead of an answer declines the pending option.
            _ if annotations.initiative == InitiativeLevel::High => return retrieval(plan, annotations, utterance),
            _ => {}
        }
    }

    let titles: Vec<String> =
        options.iter().map(|o| ctx.kb.doc(o).map(|d| d.title().to_string()).unwrap_or_else(|| o.id.clone())).collect();
    let selection = match_selection(utterance, &titles, ctx.config.thresholds.confirmation);
    match selection {
        Some(s) if !s.needs_confirmation => return start(plan, options[s.index].clone()),
        _ => {}
    }
    match (annotations.intent, annotations.initiative) {
        (_, InitiativeLevel::High) => retrieval(plan, annotations, utterance),
        (_, InitiativeLevel::RecommendationRequest) => recommender(plan, state, annotations),
        (Intent::Deny, _) => plan.add(ResponderId::AlternativeOptions, Some(alternative_options(ctx.kb, &ctx.config.options))),
        (Intent::Help, _) => plan.add(ResponderId::Help, Some(help(DialoguePhase::Selection))),
        (Intent::Affirm, _) if options.len() == 1 => start(plan, options[0].clone()),
        _ => {
            if let Some(s) = selection {
                plan.add(ResponderId::ConfirmSelection, ctx.kb.doc(&options[s.index]).map(confirm_selection));
            }
        }
    }
}

fn route_completion(plan: &mut Plan, state: &ConversationState, annotations: &AnnotationSet, utterance: &str) {
    let ctx = plan.ctx;
    let Some(session) = &state.task_session else {
        return;
    };
    let Some(doc) = ctx.kb.doc(&session.doc()) else {
        return;
    };
    let command = parse_navigation(utterance, annotations.intent)
        .or_else(|| (annotations.intent == Intent::Affirm).then_some(NavigationCommand::Next));
    if let Some(command) = command {
        let p = navigation_response(doc, session, command, &ctx.kb.fun_facts, ctx.config.thresholds.fun_fact);
        let id = p.candidate.responder_id;
        plan.add(id, Some(p));
        return;
    }
    match annotations.intent {
        Intent::Request | Intent::Recommend => plan.add(ResponderId::ChangingTask, Some(handle_change_task(doc))),
        Intent::Help => plan.add(ResponderId::Help, Some(help(DialoguePhase::Completion))),
        _ if annotations.is_question || annotations.intent == Intent::QuestionOnly => {
            let answer = qa(ctx, state, utterance);
            plan.add(ResponderId::Qa, answer);
        }
        _ => {}
    }
}

/// The fixed reply to a new task request once a task has started. The
/// session is left as it is.
pub fn handle_change_task(current: DocView) -> Proposal {
    changing_task(current.title())
}

/// Answer a question about the active task; abstains when no task is active.
fn qa(ctx: DialogueContext, state: &ConversationState, utterance: &str) -> Option<Proposal> {
    let session = state.task_session.as_ref()?;
    let doc = ctx.kb.doc(&session.doc())?;
    let answer =
        answer_question(ctx.kb, doc, &state.qa_history, utterance, &ctx.config.qa, &ctx.providers.extractive).ok()?.value;
    if answer.is_unknown() {
        return Some(Proposal::say(ResponderId::Qa, answer.text, 0.2));
    }
    let pair = QaPair { question: utterance.to_string(), answer: answer.text.clone() };
    Some(Proposal::say(ResponderId::Qa, answer.text, answer.confidence.max(0.3)).with_effect(StateEffect::QaExchange(pair)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlu::DomainPrediction;
    use crate::state::{fixtures, TaskSession};

    struct Env {
        config: Config,
        tiers: RankerTiers,
        providers: Providers,
    }

    impl Env {
        fn new() -> Self {
            Self { config: Config::default(), tiers: RankerTiers::default(), providers: Providers::default() }
        }

        fn ctx(&self) -> DialogueContext<'_> {
            DialogueContext { kb: Knowledge::bundled(), config: &self.config, tiers: &self.tiers, providers: &self.providers }
        }
    }

    fn ann(domain: Domain, intent: Intent, initiative: InitiativeLevel, question: bool) -> AnnotationSet {
        let mut scores = vec![0.0; Domain::ALL.len()];
        scores[Domain::ALL.iter().position(|d| *d == domain).unwrap()] = 0.9;
        AnnotationSet {
            domain: DomainPrediction::from_scores(scores, 0.5, false),
            intent,
            initiative,
            is_question: question,
            ..fixtures::annotations()
        }
    }

    #[test]
    fn sensitive_domains_only_deflect() {
        let env = Env::new();
        let d = route(
            env.ctx(),
            &ConversationState::new("s"),
            &ann(Domain::Medicine, Intent::QuestionOnly, InitiativeLevel::Low, true),
            "x",
        );
        assert_eq!(d.selected_generators, [ResponderId::Deflection]);
        assert_eq!(d.winning().candidate.responder_id, ResponderId::Deflection);
    }

    #[test]
    fn completion_question_adds_qa() {
        let env = Env::new();
        let mut state = ConversationState::new("s");
        state.phase = DialoguePhase::Completion;
        let doc = DocRef::recipe("recipe-classic-lemon-pie");
        let steps = Knowledge::bundled().doc(&doc).unwrap().steps().len();
        state.task_session = Some(TaskSession::start(&doc, steps));
        let d = route(
            env.ctx(),
            &state,
            &ann(Domain::Cooking, Intent::QuestionOnly, InitiativeLevel::Low, true),
            "how many eggs do I need",
        );
        assert!(d.selected_generators.contains(&ResponderId::Qa));
        assert_eq!(d.winning().candidate.responder_id, ResponderId::Qa);
        assert_eq!(d.phase_after, DialoguePhase::Completion);
    }

    #[test]
    fn mid_task_request_is_deflected() {
        let env = Env::new();
        let mut state = ConversationState::new("s");
        state.phase = DialoguePhase::Completion;
        let doc = DocRef::recipe("recipe-classic-lemon-pie");
        state.task_session = Some(TaskSession::start(&doc, 3));
        let d = route(
            env.ctx(),
            &state,
            &ann(Domain::Cooking, Intent::Request, InitiativeLevel::High, false),
            "I want to make pizza instead",
        );
        assert_eq!(d.winning().candidate.responder_id, ResponderId::ChangingTask);
        assert_eq!(d.winning().effect, StateEffect::None);
    }

    #[test]
    fn low_initiative_opening_chats() {
        let env = Env::new();
        let mut state = ConversationState::new("s");
        state.turns.push(fixtures::turn(0, DialoguePhase::Initialization));
        let d = route(env.ctx(), &state, &ann(Domain::OutOfDomain, Intent::Help, InitiativeLevel::Low, true), "What can you do?");
        assert_eq!(d.winning().candidate.responder_id, ResponderId::SocialChat);
        assert_eq!(d.phase_after, DialoguePhase::Initialization);
        assert_eq!(*d.selected_generators.last().unwrap(), ResponderId::Fallback);
    }
}
