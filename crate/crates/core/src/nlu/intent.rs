//! Ordered rule table mapping an utterance to an intent.

use serde::{Deserialize, Serialize};

use super::question::detect_question;
use crate::dialogue::navigation::{lookup_command, parse_jump};
use crate::pos::{is_auxiliary, PosTag};
use crate::resources::Knowledge;
use crate::state::{ConversationState, DialoguePhase};
use crate::text::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Intent {
    Recommend,
    Request,
    JumpSteps,
    Navigation,
    Affirm,
    Deny,
    Stop,
    Help,
    QuestionOnly,
    Chitchat,
}

impl Intent {
    pub const ALL: [Intent; 10] = [
        Intent::Recommend,
        Intent::Request,
        Intent::JumpSteps,
        Intent::Navigation,
        Intent::Affirm,
        Intent::Deny,
        Intent::Stop,
        Intent::Help,
        Intent::QuestionOnly,
        Intent::Chitchat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Intent::Recommend => "Recommend",
            Intent::Request => "Request",
            Intent::JumpSteps => "JumpSteps",
            Intent::Navigation => "Navigation",
            Intent::Affirm => "Affirm",
            Intent::Deny => "Deny",
            Intent::Stop => "Stop",
            Intent::Help => "Help",
            Intent::QuestionOnly => "QuestionOnly",
            Intent::Chitchat => "Chitchat",
        }
    }
}

const STOP: &[&str] = &[
    "stop",
    "quit",
    "exit",
    "cancel",
    "goodbye",
    "bye",
    "good bye",
    "bye bye",
    "end",
    "stop it",
    "that's all",
    "i want to stop",
    "i want to quit",
    "never mind",
    "nevermind",
    "stop cooking",
    "end the task",
    "leave",
];

const HELP: &[&str] = &[
    "help",
    "help me",
    "what can you do",
    "how can you help",
    "how can you help me",
    "what do you do",
    "what are my options",
    "what can i say",
    "i need help",
    "what can you help me with",
    "what do you know",
];

const AFFIRM: &[&str] = &[
    "yes",
    "yeah",
    "yep",
    "yup",
    "sure",
    "ok",
    "okay",
    "yes please",
    "correct",
    "right",
    "that's right",
    "that one",
    "yes that one",
    "sounds good",
    "of course",
    "absolutely",
    "let's do it",
    "do it",
    "go ahead",
    "sure thing",
    "definitely",
    "yes it is",
    "that's it",
    "exactly",
    "alright",
    "all right",
    "ok sure",
];

const DENY: &[&str] = &[
    "no",
    "nope",
    "nah",
    "no thanks",
    "no thank you",
    "not that one",
    "wrong",
    "neither",
    "none of them",
    "something else",
    "no way",
    "not really",
    "that's wrong",
    "not this one",
    "neither of them",
    "none",
];

const RECOMMEND_WORDS: &[&str] = &["recommend", "recommendation", "recommendations", "suggest", "suggestion", "suggestions"];

const RECOMMEND_PHRASES: &[&[&str]] = &[
    &["any", "ideas"],
    &["give", "me", "an", "idea"],
    &["surprise", "me"],
    &["what", "should", "i", "make"],
    &["what", "should", "i", "cook"],
    &["what", "should", "i", "bake"],
    &["what", "should", "i", "build"],
    &["what", "should", "i", "do"],
    &["what", "can", "i", "make"],
    &["what", "can", "i", "cook"],
    &["i'm", "bored"],
];

const DESIRE_PREFIXES: &[&[&str]] = &[
    &["can", "you", "tell", "me", "how", "to"],
    &["can", "you", "show", "me", "how", "to"],
    &["teach", "me", "how", "to"],
    &["show", "me", "how", "to"],
    &["tell", "me", "how", "to"],
    &["i", "would", "like", "to"],
    &["i", "would", "like"],
    &["i", "am", "looking", "for"],
    &["i'm", "looking", "for"],
    &["i", "am", "trying", "to"],
    &["i'm", "trying", "to"],
    &["can", "you", "help", "me"],
    &["can", "you", "show", "me"],
    &["can", "you", "find", "me"],
    &["i", "want", "to"],
    &["i", "need", "to"],
    &["i'd", "like", "to"],
    &["i", "plan", "to"],
    &["i", "feel", "like"],
    &["how", "do", "i"],
    &["how", "can", "i"],
    &["how", "should", "i"],
    &["how", "would", "i"],
    &["how", "do", "you"],
    &["i'd", "like"],
    &["looking", "for"],
    &["help", "me"],
    &["show", "me"],
    &["find", "me"],
    &["give", "me"],
    &["how", "to"],
    &["i", "want"],
    &["i", "need"],
    &["i", "wanna"],
    &["let's"],
];

/// Nouns too vague to name a specific task.
const GENERIC_OBJECTS: &[&str] = &[
    "recipe",
    "recipes",
    "project",
    "projects",
    "task",
    "tasks",
    "something",
    "anything",
    "idea",
    "ideas",
    "dish",
    "dishes",
    "thing",
    "things",
    "food",
    "meal",
    "stuff",
    "diy",
    "help",
    "one",
    "suggestion",
    "activity",
    "today",
    "tonight",
    "time",
    "way",
];

/// Verbs that open an utterance without naming a task.
const NON_TASK_VERBS: &[&str] = &["tell", "show", "give", "help", "go", "say", "let", "thank", "talk", "know", "think", "guess"];

const LEADING_FILLERS: &[&str] = &["hi", "hello", "hey", "so", "well", "um", "uh", "alexa", "please", "ok", "okay", "oh"];

/// Drop "please", trailing thanks and leading fillers so that command
/// lexicons match on the core phrase.
pub fn strip_politeness(tokens: &[String]) -> Vec<String> {
    let mut out: Vec<String> = tokens.iter().filter(|t| *t != "please").cloned().collect();
    while out.len() > 1 && (out.ends_with(&["thanks".to_string()]) || out.ends_with(&["thank".to_string(), "you".to_string()])) {
        let n = if out.last().is_some_and(|t| t == "you") { 2 } else { 1 };
        out.truncate(out.len() - n);
    }
    while out.len() > 1 && LEADING_FILLERS.contains(&out[0].as_str()) {
        out.remove(0);
    }
    out
}

fn contains_seq(tokens: &[String], seq: &[&str]) -> bool {
    tokens.windows(seq.len()).any(|w| w.iter().zip(seq).all(|(a, b)| a == b))
}

fn starts_with_seq(tokens: &[String], seq: &[&str]) -> bool {
    tokens.len() >= seq.len() && tokens.iter().zip(seq).all(|(a, b)| a == b)
}

/// Classify by the first matching rule: closed command lexicons, then
/// recommendation cues, then requests naming a task object, then step
/// jumps during a task, then questions, then chitchat.
pub fn classify_intent(kb: &Knowledge, utterance: &str, state: &ConversationState) -> Intent {
    let tokens = tokenize(utterance);
    let core = strip_politeness(&tokens);
    let phrase = core.join(" ");

    if STOP.contains(&phrase.as_str()) {
        return Intent::Stop;
    }
    if HELP.contains(&phrase.as_str()) {
        return Intent::Help;
    }
    if lookup_command(&phrase).is_some() {
        return Intent::Navigation;
    }
    if AFFIRM.contains(&phrase.as_str()) {
        return Intent::Affirm;
    }
    if DENY.contains(&phrase.as_str()) {
        return Intent::Deny;
    }
    if core.iter().any(|t| RECOMMEND_WORDS.contains(&t.as_str())) || RECOMMEND_PHRASES.iter().any(|p| contains_seq(&core, p)) {
        return Intent::Recommend;
    }
    if let Some(intent) = request_or_vague(kb, &core) {
        return intent;
    }
    if state.phase == DialoguePhase::Completion && parse_jump(&core).is_some() {
        return Intent::JumpSteps;
    }
    if detect_question(utterance).0 {
        return Intent::QuestionOnly;
    }
    Intent::Chitchat
}

/// `Request` when the utterance names a task object; `Recommend` when it
/// asks for a task but only in generic terms.
fn request_or_vague(kb: &Knowledge, tokens: &[String]) -> Option<Intent> {
    if tokens.is_empty() {
        return None;
    }
    let tags = kb.tagger.tag_tokens(tokens);
    let is_object = |i: usize| {
        tags[i] == PosTag::Noun && !GENERIC_OBJECTS.contains(&tokens[i].as_str()) && !kb.stopwords.contains(&tokens[i])
    };

    if let Some(prefix) = DESIRE_PREFIXES.iter().find(|p| starts_with_seq(tokens, p)) {
        let rest = prefix.len()..tokens.len();
        if rest.clone().any(is_object) {
            return Some(Intent::Request);
        }
        let names_task_verb = rest
            .clone()
            .any(|i| tags[i] == PosTag::Verb && !is_auxiliary(&tokens[i]) && !NON_TASK_VERBS.contains(&tokens[i].as_str()));
        let generic = rest.clone().any(|i| GENERIC_OBJECTS.contains(&tokens[i].as_str()));
        if names_task_verb || generic {
            return Some(Intent::Recommend);
        }
    }

    let verb_initial = tags[0] == PosTag::Verb && !is_auxiliary(&tokens[0]) && !NON_TASK_VERBS.contains(&tokens[0].as_str());
    if verb_initial && (1..tokens.len()).any(is_object) {
        return Some(Intent::Request);
    }

    let states_problem = tokens.iter().any(|t| kb.commonsense.is_problem_term(t));
    if states_problem && (0..tokens.len()).any(is_object) {
        return Some(Intent::Request);
    }
    None
}
