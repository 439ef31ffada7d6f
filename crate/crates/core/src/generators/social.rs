//! Canned, persona-grounded small talk with a hard turn budget.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Proposal, ResponseCandidate, StateEffect};
use crate::lexicon::{parse_rows, LoadError};
use crate::state::{ConversationState, ResponderId, MAX_SOCIAL_TURNS};
use crate::text::tokenize;

pub const DEFAULT_PERSONA: &str = "I enjoy helping people with cooking and home improvement projects.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PersonaConfig {
    pub persona_sentence: String,
    pub max_social_turns: u32,
}

impl Default for PersonaConfig {
    fn default() -> Self {
        Self { persona_sentence: DEFAULT_PERSONA.to_string(), max_social_turns: MAX_SOCIAL_TURNS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SocialTopic {
    Greeting,
    Feelings,
    Capability,
    Persona,
    Other,
}

impl SocialTopic {
    pub const ALL: [SocialTopic; 5] =
        [SocialTopic::Greeting, SocialTopic::Feelings, SocialTopic::Capability, SocialTopic::Persona, SocialTopic::Other];

    pub fn name(self) -> &'static str {
        match self {
            SocialTopic::Greeting => "greeting",
            SocialTopic::Feelings => "feelings",
            SocialTopic::Capability => "capability",
            SocialTopic::Persona => "persona",
            SocialTopic::Other => "other",
        }
    }
}

/// Response templates per topic. `{persona}` is replaced by the persona
/// sentence.
#[derive(Debug, Clone, Default)]
pub struct SocialTemplates {
    by_topic: BTreeMap<SocialTopic, Vec<String>>,
}

impl SocialTemplates {
    /// `topic<TAB>template` lines. Every topic needs at least one template
    /// and every template must end in a question mark.
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let mut by_topic: BTreeMap<SocialTopic, Vec<String>> = BTreeMap::new();
        for row in parse_rows(text, 2)? {
            let topic = SocialTopic::ALL
                .into_iter()
                .find(|t| t.name() == row.fields[0])
                .ok_or_else(|| LoadError::Malformed { line: row.line, message: format!("unknown topic {:?}", row.fields[0]) })?;
            let template = row.fields[1].trim().to_string();
            if !template.ends_with('?') {
                return Err(LoadError::Malformed { line: row.line, message: "template must end with a question".into() });
            }
            by_topic.entry(topic).or_default().push(template);
        }
        if let Some(missing) = SocialTopic::ALL.into_iter().find(|t| !by_topic.contains_key(t)) {
            return Err(LoadError::Malformed { line: 0, message: format!("no templates for {}", missing.name()) });
        }
        Ok(Self { by_topic })
    }

    pub fn templates(&self, topic: SocialTopic) -> &[String] {
        self.by_topic.get(&topic).map(Vec::as_slice).unwrap_or_default()
    }
}

fn has_run(tokens: &[String], run: &[&str]) -> bool {
    tokens.windows(run.len()).any(|w| w.iter().zip(run).all(|(a, b)| a == b))
}

/// Shallow topic detection over a few fixed phrases.
pub fn detect_topic(utterance: &str) -> SocialTopic {
    let tokens = tokenize(utterance);
    let any = |runs: &[&[&str]]| runs.iter().any(|r| has_run(&tokens, r));
    if any(&[
        &["about", "yourself"],
        &["who", "are", "you"],
        &["your", "name"],
        &["what", "are", "you"],
        &["do", "you", "like"],
        &["your", "favorite"],
        &["tell", "me", "about", "you"],
    ]) {
        SocialTopic::Persona
    } else if any(&[
        &["what", "can", "you", "do"],
        &["what", "do", "you", "do"],
        &["how", "can", "you", "help"],
        &["help"],
        &["can", "you", "do"],
    ]) {
        SocialTopic::Capability
    } else if any(&[
        &["how", "are", "you"],
        &["how's", "it", "going"],
        &["how", "is", "it", "going"],
        &["how", "do", "you", "feel"],
        &["how", "have", "you", "been"],
        &["how", "are", "things"],
        &["how", "is", "your", "day"],
    ]) {
        SocialTopic::Feelings
    } else if tokens.first().is_some_and(|t| ["hi", "hello", "hey", "howdy", "greetings", "yo", "good"].contains(&t.as_str())) {
        SocialTopic::Greeting
    } else {
        SocialTopic::Other
    }
}

/// A canned reply for `utterance`, or `None` once the social budget is spent.
/// The template is picked by turn position so replays are identical.
pub fn social_chat(
    utterance: &str,
    state: &ConversationState,
    persona: &PersonaConfig,
    templates: &SocialTemplates,
) -> Option<Proposal> {
    let budget = persona.max_social_turns.min(MAX_SOCIAL_TURNS);
    if state.social_chat_turns_used >= budget {
        return None;
    }
    let topic = detect_topic(utterance);
    let choices = templates.templates(topic);
    if choices.is_empty() {
        return None;
    }
    let template = &choices[(state.turns.len() + state.social_chat_turns_used as usize) % choices.len()];
    let text = template.replace("{persona}", &persona.persona_sentence);
    Some(Proposal { candidate: ResponseCandidate::new(ResponderId::SocialChat, text, 0.9), effect: StateEffect::SocialTurn })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::Knowledge;

    fn chat(utterance: &str, used: u32) -> Option<Proposal> {
        let mut state = ConversationState::new("s");
        state.social_chat_turns_used = used;
        social_chat(utterance, &state, &PersonaConfig::default(), &Knowledge::bundled().social)
    }

    #[test]
    fn topics() {
        assert_eq!(detect_topic("how are you"), SocialTopic::Feelings);
        assert_eq!(detect_topic("tell me about yourself"), SocialTopic::Persona);
        assert_eq!(detect_topic("What can you do?"), SocialTopic::Capability);
        assert_eq!(detect_topic("hello there"), SocialTopic::Greeting);
        assert_eq!(detect_topic("the weather is nice"), SocialTopic::Other);
    }

    #[test]
    fn replies_end_with_a_redirect_question() {
        let reply = chat("how are you", 0).unwrap();
        assert!(reply.candidate.text.ends_with('?'));
        assert_eq!(reply.effect, StateEffect::SocialTurn);
        let about = chat("tell me about yourself", 1).unwrap();
        assert!(about.candidate.text.contains(DEFAULT_PERSONA));
    }

    #[test]
    fn third_turn_abstains() {
        assert!(chat("how are you", 2).is_none());
    }

    #[test]
    fn every_bundled_template_is_a_question() {
        let t = &Knowledge::bundled().social;
        for topic in SocialTopic::ALL {
            assert!(!t.templates(topic).is_empty());
            assert!(t.templates(topic).iter().all(|s| s.ends_with('?')));
        }
        assert!(t.templates(SocialTopic::Persona).iter().all(|s| s.contains("{persona}")));
    }
}
