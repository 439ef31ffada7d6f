//! Per-turn language understanding: domain, intent, question and initiative.

mod domain;
mod intent;
mod question;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use domain::{detect_domain, Domain, DomainLexicons, DomainPrediction, EntailmentLabel};
pub use intent::{classify_intent, strip_politeness, Intent};
pub use question::detect_question;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NluError {
    #[error("utterance is empty")]
    EmptyUtterance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitiativeLevel {
    High,
    Low,
    RecommendationRequest,
}

impl InitiativeLevel {
    pub const ALL: [InitiativeLevel; 3] = [InitiativeLevel::High, InitiativeLevel::Low, InitiativeLevel::RecommendationRequest];
}

/// How much goal content the user supplied on this turn.
pub fn classify_initiative(domain: &DomainPrediction, intent: Intent, _utterance: &str) -> InitiativeLevel {
    initiative_for(domain.chosen, intent)
}

pub fn initiative_for(domain: Domain, intent: Intent) -> InitiativeLevel {
    match intent {
        Intent::Recommend => InitiativeLevel::RecommendationRequest,
        Intent::Request if domain.is_task_domain() => InitiativeLevel::High,
        _ => InitiativeLevel::Low,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initiative_table_is_total() {
        for domain in Domain::ALL {
            for intent in Intent::ALL {
                let expected = if intent == Intent::Recommend {
                    InitiativeLevel::RecommendationRequest
                } else if intent == Intent::Request && matches!(domain, Domain::Diy | Domain::Cooking) {
                    InitiativeLevel::High
                } else {
                    InitiativeLevel::Low
                };
                assert_eq!(initiative_for(domain, intent), expected, "{domain:?} {intent:?}");
            }
        }
    }

    #[test]
    fn examples() {
        assert_eq!(initiative_for(Domain::Diy, Intent::Request), InitiativeLevel::High);
        assert_eq!(initiative_for(Domain::OutOfDomain, Intent::Help), InitiativeLevel::Low);
        assert_eq!(initiative_for(Domain::Diy, Intent::Recommend), InitiativeLevel::RecommendationRequest);
    }
}
