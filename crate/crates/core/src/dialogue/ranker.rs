//! Fixed-priority response ranking. Tiers come from configuration; within a
//! tier the more confident candidate wins, then the alphabetically first text.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::generators::ResponseCandidate;
use crate::state::ResponderId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RankError {
    #[error("no candidates to rank")]
    NoCandidates,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TierError {
    #[error("unknown responder {0:?} in the tier table")]
    UnknownResponder(String),
    #[error("responder {0} has no tier")]
    MissingResponder(ResponderId),
}

/// Tier per responder; lower tiers win.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankerTiers {
    tiers: [u32; ResponderId::ALL.len()],
}

fn slot(id: ResponderId) -> usize {
    ResponderId::ALL.iter().position(|r| *r == id).unwrap_or(0)
}

impl Default for RankerTiers {
    /// Safety first, then the task manager, answers, option lists, the
    /// recommender, the greeting, small talk and last the fallback.
    fn default() -> Self {
        use ResponderId::*;
        let mut tiers = [0; ResponderId::ALL.len()];
        for (id, tier) in [
            (Deflection, 0),
            (Stop, 1),
            (ChangingTask, 1),
            (TaskContent, 1),
            (Ingredients, 1),
            (TaskCompleted, 1),
            (ConfirmSelection, 1),
            (Help, 1),
            (Qa, 2),
            (ShowOptions, 3),
            (AlternativeOptions, 3),
            (Recommender, 4),
            (Launch, 5),
            (SocialChat, 6),
            (Elicitation, 6),
            (Fallback, 7),
        ] {
            tiers[slot(id)] = tier;
        }
        Self { tiers }
    }
}

impl RankerTiers {
    /// Every responder must appear exactly once, keyed by its kebab-case id.
    pub fn from_map(map: &BTreeMap<String, u32>) -> Result<Self, TierError> {
        if let Some(unknown) = map.keys().find(|k| ResponderId::parse(k).is_none()) {
            return Err(TierError::UnknownResponder(unknown.clone()));
        }
        let mut tiers = [0; ResponderId::ALL.len()];
        for id in ResponderId::ALL {
            tiers[slot(id)] = *map.get(id.as_str()).ok_or(TierError::MissingResponder(id))?;
        }
        Ok(Self { tiers })
    }

    pub fn to_map(&self) -> BTreeMap<String, u32> {
        ResponderId::ALL.iter().map(|id| (id.as_str().to_string(), self.tier(*id))).collect()
    }

    pub fn tier(&self, id: ResponderId) -> u32 {
        self.tiers[slot(id)]
    }

    pub fn assign(&self, candidate: &mut ResponseCandidate) {
        candidate.tier = self.tier(candidate.responder_id);
    }
}

fn better(a: &ResponseCandidate, b: &ResponseCandidate) -> Ordering {
    a.tier.cmp(&b.tier).then_with(|| b.confidence.total_cmp(&a.confidence)).then_with(|| a.text.cmp(&b.text))
}

/// Index of the winning candidate. The first of several identical
/// candidates wins.
pub fn rank_responses(candidates: &[ResponseCandidate]) -> Result<usize, RankError> {
    let mut best: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        if best.is_none_or(|b| better(c, &candidates[b]) == Ordering::Less) {
            best = Some(i);
        }
    }
    best.ok_or(RankError::NoCandidates)
}
