//! Step navigation during a task: the command lexicon, step-number
//! grammar, and the session update each command implies.

use serde::{Deserialize, Serialize};

use crate::nlu::{strip_politeness, Intent};
use crate::state::{DocKind, TaskSession};
use crate::text::{cardinal, ordinal, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NavigationCommand {
    Next,
    Previous,
    Repeat,
    /// 1-based step number.
    JumpTo(usize),
    ShowIngredients,
    LastStep,
    Complete,
    Stop,
}

const COMMANDS: &[(&str, NavigationCommand)] = &[
    ("next", NavigationCommand::Next),
    ("next step", NavigationCommand::Next),
    ("next one", NavigationCommand::Next),
    ("go on", NavigationCommand::Next),
    ("continue", NavigationCommand::Next),
    ("keep going", NavigationCommand::Next),
    ("move on", NavigationCommand::Next),
    ("go to the next step", NavigationCommand::Next),
    ("go to next step", NavigationCommand::Next),
    ("next instruction", NavigationCommand::Next),
    ("previous", NavigationCommand::Previous),
    ("previous step", NavigationCommand::Previous),
    ("previous one", NavigationCommand::Previous),
    ("go back", NavigationCommand::Previous),
    ("back", NavigationCommand::Previous),
    ("step back", NavigationCommand::Previous),
    ("go back a step", NavigationCommand::Previous),
    ("go to the previous step", NavigationCommand::Previous),
    ("repeat", NavigationCommand::Repeat),
    ("repeat that", NavigationCommand::Repeat),
    ("repeat the step", NavigationCommand::Repeat),
    ("repeat step", NavigationCommand::Repeat),
    ("say that again", NavigationCommand::Repeat),
    ("again", NavigationCommand::Repeat),
    ("one more time", NavigationCommand::Repeat),
    ("come again", NavigationCommand::Repeat),
    ("show ingredients", NavigationCommand::ShowIngredients),
    ("show the ingredients", NavigationCommand::ShowIngredients),
    ("show me the ingredients", NavigationCommand::ShowIngredients),
    ("list the ingredients", NavigationCommand::ShowIngredients),
    ("read the ingredients", NavigationCommand::ShowIngredients),
    ("ingredients", NavigationCommand::ShowIngredients),
    ("ingredient list", NavigationCommand::ShowIngredients),
    ("go to the last step", NavigationCommand::LastStep),
    ("go to last step", NavigationCommand::LastStep),
    ("last step", NavigationCommand::LastStep),
    ("final step", NavigationCommand::LastStep),
    ("go to the final step", NavigationCommand::LastStep),
    ("jump to the last step", NavigationCommand::LastStep),
    ("skip to the last step", NavigationCommand::LastStep),
    ("skip to the end", NavigationCommand::LastStep),
    ("i'm done", NavigationCommand::Complete),
    ("i am done", NavigationCommand::Complete),
    ("done", NavigationCommand::Complete),
    ("all done", NavigationCommand::Complete),
    ("finished", NavigationCommand::Complete),
    ("i'm finished", NavigationCommand::Complete),
    ("i finished", NavigationCommand::Complete),
    ("i did it", NavigationCommand::Complete),
    ("task complete", NavigationCommand::Complete),
    ("mark it complete", NavigationCommand::Complete),
];

/// Every phrase in the closed command lexicon.
pub fn command_phrases() -> impl Iterator<Item = &'static str> {
    COMMANDS.iter().map(|(p, _)| *p)
}

/// Exact lookup of a normalized phrase in the command lexicon.
pub fn lookup_command(phrase: &str) -> Option<NavigationCommand> {
    COMMANDS.iter().find(|(p, _)| *p == phrase).map(|(_, c)| *c)
}

const JUMP_FILLERS: &[&str] =
    &["go", "to", "skip", "jump", "take", "me", "move", "the", "let's", "lets", "read", "show", "on", "now", "back"];

/// Step number named by "step 3", "step number three", "the third step" or
/// "go to step 2". Every other token must be a filler.
pub fn parse_jump(tokens: &[String]) -> Option<usize> {
    let at = tokens.iter().position(|t| t == "step")?;
    let mut number = None;
    let mut rest: Vec<&str> = Vec::new();
    let after = &tokens[at + 1..];
    let before = &tokens[..at];
    match after {
        [n] if cardinal(n).is_some() => number = cardinal(n),
        [num, n] if num == "number" && cardinal(n).is_some() => number = cardinal(n),
        [] => {}
        _ => return None,
    }
    if number.is_none() {
        let (last, head) = before.split_last()?;
        number = ordinal(last);
        rest.extend(head.iter().map(String::as_str));
    } else {
        rest.extend(before.iter().map(String::as_str));
    }
    let number = number.filter(|&n| n > 0)?;
    rest.iter().all(|t| JUMP_FILLERS.contains(t)).then_some(number)
}

/// The command an utterance issues during a task, if any.
pub fn parse_navigation(utterance: &str, intent: Intent) -> Option<NavigationCommand> {
    if intent == Intent::Stop {
        return Some(NavigationCommand::Stop);
    }
    let core = strip_politeness(&tokenize(utterance));
    if let Some(command) = lookup_command(&core.join(" ")) {
        return Some(command);
    }
    parse_jump(&core).map(NavigationCommand::JumpTo)
}

/// What to say after a navigation command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContentKey {
    /// Read the current step.
    Step,
    Ingredients,
    TaskCompleted,
    NoPreviousStep,
    StepOutOfRange {
        requested: usize,
    },
    NoIngredientsForDiy,
    Stopped,
}

impl ContentKey {
    pub fn as_str(self) -> &'static str {
        match self {
            ContentKey::Step => "step",
            ContentKey::Ingredients => "ingredients",
            ContentKey::TaskCompleted => "task-completed",
            ContentKey::NoPreviousStep => "no-previous-step",
            ContentKey::StepOutOfRange { .. } => "step-out-of-range",
            ContentKey::NoIngredientsForDiy => "no-ingredients-for-diy",
            ContentKey::Stopped => "stopped",
        }
    }
}

/// Apply `command` to a started session. Invalid moves leave the session as
/// it was and return an error key instead of clamping.
pub fn apply_navigation(session: &TaskSession, command: NavigationCommand) -> (TaskSession, ContentKey) {
    let mut next = session.clone();
    let key = match command {
        NavigationCommand::Next if session.is_last_step() => {
            next.completed = true;
            ContentKey::TaskCompleted
        }
        NavigationCommand::Next => {
            next.step_index += 1;
            ContentKey::Step
        }
        NavigationCommand::Previous if session.step_index == 0 => ContentKey::NoPreviousStep,
        NavigationCommand::Previous => {
            next.step_index -= 1;
            ContentKey::Step
        }
        NavigationCommand::Repeat => ContentKey::Step,
        NavigationCommand::JumpTo(step) if step == 0 || step > session.step_count => {
            ContentKey::StepOutOfRange { requested: step }
        }
        NavigationCommand::JumpTo(step) => {
            next.step_index = step - 1;
            ContentKey::Step
        }
        NavigationCommand::LastStep => {
            next.step_index = session.step_count - 1;
            ContentKey::Step
        }
        NavigationCommand::ShowIngredients if session.doc_kind == DocKind::Task => ContentKey::NoIngredientsForDiy,
        NavigationCommand::ShowIngredients => ContentKey::Ingredients,
        NavigationCommand::Complete => {
            next.step_index = session.step_count - 1;
            next.completed = true;
            ContentKey::TaskCompleted
        }
        NavigationCommand::Stop => ContentKey::Stopped,
    };
    (next, key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DocRef;

    fn session(step: usize, count: usize, kind: DocKind) -> TaskSession {
        let doc = DocRef { kind, id: "d".into() };
        TaskSession { step_index: step, ..TaskSession::start(&doc, count) }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_navigation("go to the last step", Intent::Navigation), Some(NavigationCommand::LastStep));
        assert_eq!(parse_navigation("show ingredients", Intent::Navigation), Some(NavigationCommand::ShowIngredients));
        assert_eq!(parse_navigation("step 3 please", Intent::JumpSteps), Some(NavigationCommand::JumpTo(3)));
        assert_eq!(parse_navigation("go to step three", Intent::JumpSteps), Some(NavigationCommand::JumpTo(3)));
        assert_eq!(parse_navigation("skip to the second step", Intent::JumpSteps), Some(NavigationCommand::JumpTo(2)));
        assert_eq!(parse_navigation("step number 4", Intent::JumpSteps), Some(NavigationCommand::JumpTo(4)));
        assert_eq!(parse_navigation("stop", Intent::Stop), Some(NavigationCommand::Stop));
        assert_eq!(parse_navigation("I like this step a lot", Intent::Chitchat), None);
        assert_eq!(parse_navigation("step", Intent::Chitchat), None);
        assert_eq!(parse_navigation("step 0", Intent::Chitchat), None);
    }

    #[test]
    fn apply_examples() {
        let s = session(0, 3, DocKind::Recipe);
        let (n, key) = apply_navigation(&s, NavigationCommand::Next);
        assert_eq!((n.step_index, key), (1, ContentKey::Step));

        let last = session(2, 3, DocKind::Recipe);
        let (n, key) = apply_navigation(&last, NavigationCommand::Next);
        assert!(n.completed);
        assert_eq!(key, ContentKey::TaskCompleted);

        let one = session(1, 3, DocKind::Recipe);
        let (n, key) = apply_navigation(&one, NavigationCommand::JumpTo(99));
        assert_eq!(n, one);
        assert_eq!(key, ContentKey::StepOutOfRange { requested: 99 });

        let (n, key) = apply_navigation(&s, NavigationCommand::Previous);
        assert_eq!((n, key), (s.clone(), ContentKey::NoPreviousStep));

        let task = session(1, 4, DocKind::Task);
        assert_eq!(apply_navigation(&task, NavigationCommand::ShowIngredients), (task.clone(), ContentKey::NoIngredientsForDiy));
        assert_eq!(apply_navigation(&task, NavigationCommand::LastStep).0.step_index, 3);
        let (done, key) = apply_navigation(&task, NavigationCommand::Complete);
        assert!(done.completed && done.validate().is_ok());
        assert_eq!(key, ContentKey::TaskCompleted);
    }

    #[test]
    fn applied_sessions_stay_valid() {
        let commands = [
            NavigationCommand::Next,
            NavigationCommand::Previous,
            NavigationCommand::Repeat,
            NavigationCommand::JumpTo(0),
            NavigationCommand::JumpTo(2),
            NavigationCommand::JumpTo(7),
            NavigationCommand::LastStep,
            NavigationCommand::ShowIngredients,
            NavigationCommand::Complete,
        ];
        for count in 1..5 {
            for step in 0..count {
                for c in commands {
                    let (n, _) = apply_navigation(&session(step, count, DocKind::Recipe), c);
                    assert_eq!(n.validate(), Ok(()), "{c:?} at {step}/{count}");
                }
            }
        }
    }
}
