//! The opening greeting and the recommender.

use super::content::{alternative_options, OptionsConfig};
use super::{DocView, GeneratorError, Proposal, StateEffect};
use crate::nlu::Domain;
use crate::provider::{with_fallback, Provider, ProviderError, Scored};
use crate::resources::Knowledge;
use crate::state::{ConversationState, DocRef, ResponderId};

pub const MAX_PROMPT_CHARS: usize = 160;
pub const RECOMMENDATION_COUNT: usize = 3;

/// FNV-1a, so the pick for a session id never changes between runs or builds.
fn stable_hash(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Greeting, one proactive suggestion and what the bot can do. The
/// suggestion rotates with the session id.
pub fn launch_greeting(kb: &Knowledge, state: &ConversationState) -> Result<Proposal, GeneratorError> {
    if !state.turns.is_empty() {
        return Err(GeneratorError::NotFirstTurn);
    }
    let suggestion = match kb.suggestions.len() {
        0 => String::new(),
        n => format!(" {}", kb.suggestions[(stable_hash(&state.session_id) % n as u64) as usize]),
    };
    let text = format!(
        "Hi, I'm your cooking and DIY assistant!{suggestion} I can help you with recipes in the kitchen \
         and DIY projects around the house. What would you like to do today?"
    );
    Ok(Proposal::say(ResponderId::Launch, text, 1.0))
}

fn fill_template(template: &str, task_name: &str) -> String {
    template.replace("{task}", task_name)
}

/// One engaging sentence that names the task verbatim, at most 160
/// characters. `rotation` picks the template; a template that would run
/// long gives way to the next one that fits.
pub fn conversational_prompt_for_task(
    kb: &Knowledge,
    task_name: &str,
    rotation: usize,
    provider: &Provider,
) -> Result<Scored<String>, GeneratorError> {
    let task_name = task_name.trim();
    if task_name.is_empty() {
        return Err(GeneratorError::EmptyTaskName);
    }
    if task_name.chars().count() > MAX_PROMPT_CHARS {
        return Err(GeneratorError::TaskNameTooLong);
    }
    let fits = |s: &String| s.contains(task_name) && s.chars().count() <= MAX_PROMPT_CHARS;
    let heuristic = || {
        let n = kb.prompt_templates.len();
        (0..n)
            .map(|i| fill_template(&kb.prompt_templates[(rotation + i) % n], task_name))
            .find(fits)
            .unwrap_or_else(|| task_name.to_string())
    };
    let remote = |r: &crate::provider::RemoteProvider| {
        let instruction = format!("Write an interesting, engaging and conversational sentence for the task: {task_name}");
        let text = r.text(&instruction, &[])?;
        if fits(&text) {
            Ok(text)
        } else {
            Err(ProviderError::Malformed("generated prompt misses the task name or is too long".into()))
        }
    };
    Ok(with_fallback(provider, remote, heuristic))
}

fn by_popularity<'a>(mut docs: Vec<DocView<'a>>) -> Vec<DocView<'a>> {
    docs.sort_by(|a, b| b.popularity().cmp(&a.popularity()).then_with(|| a.id().cmp(b.id())));
    docs
}

/// Recommendation pool: one corpus for a task domain, otherwise both,
/// interleaved with DIY first.
fn pool(kb: &Knowledge, domain: Option<Domain>) -> Vec<DocView<'_>> {
    let tasks = by_popularity(kb.tasks.docs().iter().map(DocView::Task).collect());
    let recipes = by_popularity(kb.recipes.docs().iter().map(DocView::Recipe).collect());
    match domain {
        Some(Domain::Diy) => tasks,
        Some(Domain::Cooking) => recipes,
        _ => {
            let mut mixed = Vec::with_capacity(tasks.len() + recipes.len());
            let (mut t, mut r) = (tasks.into_iter(), recipes.into_iter());
            loop {
                match (t.next(), r.next()) {
                    (None, None) => break,
                    (a, b) => mixed.extend(a.into_iter().chain(b)),
                }
            }
            mixed
        }
    }
}

/// Three popular documents not offered before in this conversation, each
/// introduced by a conversational prompt. Once everything has been offered,
/// earlier picks come round again.
pub fn recommend(
    kb: &Knowledge,
    domain: Option<Domain>,
    state: &ConversationState,
    provider: &Provider,
    options: &OptionsConfig,
) -> Proposal {
    let pool = pool(kb, domain.filter(|d| d.is_task_domain()));
    if pool.is_empty() {
        return alternative_options(kb, options);
    }
    let offered = |d: &DocView| state.recommended.contains(&d.doc_ref());
    let mut picks: Vec<DocView> = pool.iter().copied().filter(|d| !offered(d)).take(RECOMMENDATION_COUNT).collect();
    for d in &pool {
        if picks.len() == RECOMMENDATION_COUNT {
            break;
        }
        if !picks.iter().any(|p| p.id() == d.id()) {
            picks.push(*d);
        }
    }
    let prompts: Vec<String> = picks
        .iter()
        .enumerate()
        .map(|(i, d)| {
            conversational_prompt_for_task(kb, d.title(), state.recommended.len() + i, provider)
                .map(|s| s.value)
                .unwrap_or_else(|_| d.title().to_string())
        })
        .collect();
    let listed: Vec<String> = prompts.iter().enumerate().map(|(i, p)| format!("{}. {p}", i + 1)).collect();
    let text = format!("Here are a few ideas. {} Which one sounds good?", listed.join(" "));
    let refs: Vec<DocRef> = picks.iter().map(|d| d.doc_ref()).collect();
    Proposal::say(ResponderId::Recommender, text, 0.8).with_effect(StateEffect::Recommend { options: refs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::fake;
    use crate::state::DocKind;
    use std::time::Duration;

    fn kb() -> &'static Knowledge {
        Knowledge::bundled()
    }

    #[test]
    fn greeting_mentions_both_domains_and_a_suggestion() {
        let p = launch_greeting(kb(), &ConversationState::new("a")).unwrap();
        assert!(p.candidate.text.contains("cooking") && p.candidate.text.contains("DIY"));
        assert!(kb().suggestions.iter().any(|s| p.candidate.text.contains(s.as_str())));
    }

    #[test]
    fn sessions_rotate_suggestions() {
        let a = launch_greeting(kb(), &ConversationState::new("session-a")).unwrap();
        let b = launch_greeting(kb(), &ConversationState::new("session-b")).unwrap();
        assert_ne!(a.candidate.text, b.candidate.text);
    }

    #[test]
    fn greeting_only_on_turn_zero() {
        let mut s = ConversationState::new("a");
        s.turns.push(crate::state::fixtures::turn(0, crate::state::DialoguePhase::Initialization));
        assert_eq!(launch_greeting(kb(), &s), Err(GeneratorError::NotFirstTurn));
    }

    #[test]
    fn prompt_contains_name_and_rotates() {
        let name = "Plant a Vegetable Garden";
        let mut seen = std::collections::HashSet::new();
        for r in 0..5 {
            let p = conversational_prompt_for_task(kb(), name, r, &Provider::Heuristic).unwrap();
            assert!(p.value.contains(name) && p.value.chars().count() <= MAX_PROMPT_CHARS);
            seen.insert(p.value);
        }
        assert!(seen.len() >= 3);
        assert_eq!(conversational_prompt_for_task(kb(), " ", 0, &Provider::Heuristic), Err(GeneratorError::EmptyTaskName));
    }

    #[test]
    fn remote_prompt_falls_back_when_down() {
        let dead = Provider::remote(fake::dead_endpoint(), Duration::from_millis(200));
        let p = conversational_prompt_for_task(kb(), "Bake Bread", 0, &dead).unwrap();
        assert!(p.degraded && p.value.contains("Bake Bread"));
        let url = fake::serve(r#"{"texts":["Fancy trying Bake Bread this weekend?"]}"#, 1);
        let live = Provider::remote(url, Duration::from_secs(2));
        let p = conversational_prompt_for_task(kb(), "Bake Bread", 0, &live).unwrap();
        assert_eq!(p, Scored { value: "Fancy trying Bake Bread this weekend?".into(), degraded: false });
    }

    fn options(p: &Proposal) -> Vec<DocRef> {
        match &p.effect {
            StateEffect::Recommend { options } => options.clone(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diy_recommendations_are_three_tasks() {
        let p = recommend(kb(), Some(Domain::Diy), &ConversationState::new("s"), &Provider::Heuristic, &OptionsConfig::default());
        let o = options(&p);
        assert_eq!(o.len(), 3);
        assert!(o.iter().all(|d| d.kind == DocKind::Task));
        assert!(p.candidate.text.chars().count() <= super::super::MAX_RESPONSE_CHARS);
    }

    #[test]
    fn mixed_list_starts_with_diy() {
        let p = recommend(kb(), None, &ConversationState::new("s"), &Provider::Heuristic, &OptionsConfig::default());
        let kinds: Vec<DocKind> = options(&p).iter().map(|d| d.kind).collect();
        assert_eq!(kinds, [DocKind::Task, DocKind::Recipe, DocKind::Task]);
    }

    #[test]
    fn repeated_requests_are_disjoint_until_exhausted() {
        let mut state = ConversationState::new("s");
        let total = kb().tasks.len();
        let mut seen = Vec::new();
        while seen.len() + RECOMMENDATION_COUNT <= total {
            let o = options(&recommend(kb(), Some(Domain::Diy), &state, &Provider::Heuristic, &OptionsConfig::default()));
            assert!(o.iter().all(|d| !seen.contains(d)), "{o:?}");
            seen.extend(o.iter().cloned());
            state.recommended.extend(o);
        }
        let o = options(&recommend(kb(), Some(Domain::Diy), &state, &Provider::Heuristic, &OptionsConfig::default()));
        assert_eq!(o.len(), 3);
    }
}
