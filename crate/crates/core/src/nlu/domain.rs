//! Domain detection phrased as entailment: one hypothesis per domain, each
//! scored against the utterance as premise.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::NluError;
use crate::lexicon::PhraseLexicon;
use crate::provider::{with_fallback, Provider};
use crate::text::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    Diy,
    Cooking,
    Finance,
    Medicine,
    Law,
    Harm,
    PornGamblingDrugs,
    LoveRelationship,
    OutOfDomain,
}

impl Domain {
    /// Every domain, in tie-breaking order.
    pub const ALL: [Domain; 9] = [
        Domain::Diy,
        Domain::Cooking,
        Domain::Finance,
        Domain::Medicine,
        Domain::Law,
        Domain::Harm,
        Domain::PornGamblingDrugs,
        Domain::LoveRelationship,
        Domain::OutOfDomain,
    ];

    /// Sensitive domains the bot declines to discuss.
    pub fn avoid(self) -> bool {
        matches!(
            self,
            Domain::Finance
                | Domain::Medicine
                | Domain::Law
                | Domain::Harm
                | Domain::PornGamblingDrugs
                | Domain::LoveRelationship
        )
    }

    pub fn is_task_domain(self) -> bool {
        matches!(self, Domain::Diy | Domain::Cooking)
    }

    /// The phrase filled into the hypothesis template.
    pub fn label(self) -> &'static str {
        match self {
            Domain::Diy => "DIY",
            Domain::Cooking => "cooking",
            Domain::Finance => "finance",
            Domain::Medicine => "medicine",
            Domain::Law => "law",
            Domain::Harm => "harm",
            Domain::PornGamblingDrugs => "pornography, gambling or drugs",
            Domain::LoveRelationship => "love or relationship",
            Domain::OutOfDomain => "other things",
        }
    }

    pub fn hypothesis(self) -> String {
        format!("This text is about {}", self.label())
    }

    /// File stem of the lexicon for this domain.
    pub fn lexicon_name(self) -> &'static str {
        match self {
            Domain::Diy => "diy",
            Domain::Cooking => "cooking",
            Domain::Finance => "finance",
            Domain::Medicine => "medicine",
            Domain::Law => "law",
            Domain::Harm => "harm",
            Domain::PornGamblingDrugs => "porn_gambling_drugs",
            Domain::LoveRelationship => "love_relationship",
            Domain::OutOfDomain => "out_of_domain",
        }
    }

    fn index(self) -> usize {
        Domain::ALL.iter().position(|d| *d == self).unwrap_or(0)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntailmentLabel {
    Entailment,
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainPrediction {
    /// Entailment score per domain, in `Domain::ALL` order.
    pub scores: Vec<f64>,
    pub chosen: Domain,
    pub label: EntailmentLabel,
    /// Set when a remote provider failed and the heuristic answered instead.
    pub degraded: bool,
}

impl DomainPrediction {
    pub fn score(&self, domain: Domain) -> f64 {
        self.scores[domain.index()]
    }

    /// Build from scores in `Domain::ALL` order.
    pub fn from_scores(scores: Vec<f64>, threshold: f64, degraded: bool) -> Self {
        let mut chosen = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[chosen] {
                chosen = i;
            }
        }
        let label = if scores[chosen] >= threshold { EntailmentLabel::Entailment } else { EntailmentLabel::Contradiction };
        Self { scores, chosen: Domain::ALL[chosen], label, degraded }
    }
}

/// One weighted lexicon per domain.
#[derive(Debug, Clone, Default)]
pub struct DomainLexicons {
    lexicons: Vec<PhraseLexicon>,
}

impl DomainLexicons {
    /// `lexicons` in `Domain::ALL` order.
    pub fn new(lexicons: Vec<PhraseLexicon>) -> Self {
        assert_eq!(lexicons.len(), Domain::ALL.len());
        Self { lexicons }
    }

    pub fn get(&self, domain: Domain) -> &PhraseLexicon {
        &self.lexicons[domain.index()]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { lexicons: self.lexicons.iter().map(|l| l.scaled(factor)).collect() }
    }

    /// Summed weight of matched terms per domain.
    pub fn raw_scores(&self, utterance: &str) -> Vec<f64> {
        let tokens = tokenize(utterance);
        self.lexicons.iter().map(|l| l.score(&tokens)).collect()
    }

    /// Heuristic entailment scores in `Domain::ALL` order.
    ///
    /// Each domain saturates its raw score as `raw / (raw + 1)`. The
    /// out-of-domain hypothesis is fully entailed when no in-domain term
    /// matched at all.
    pub fn entailment_scores(&self, utterance: &str) -> Vec<f64> {
        let raw = self.raw_scores(utterance);
        let ood = Domain::OutOfDomain.index();
        let nothing_in_domain = raw.iter().enumerate().all(|(i, r)| i == ood || *r == 0.0);
        raw.iter().enumerate().map(|(i, &r)| if i == ood && nothing_in_domain { 1.0 } else { r / (r + 1.0) }).collect()
    }
}

/// Score every domain hypothesis for `utterance` and pick the best.
pub fn detect_domain(
    utterance: &str,
    lexicons: &DomainLexicons,
    provider: &Provider,
    threshold: f64,
) -> Result<DomainPrediction, NluError> {
    if utterance.trim().is_empty() {
        return Err(NluError::EmptyUtterance);
    }
    let hypotheses: Vec<String> = Domain::ALL.iter().map(|d| d.hypothesis()).collect();
    let scored =
        with_fallback(provider, |remote| remote.scores(utterance, &hypotheses), || lexicons.entailment_scores(utterance));
    Ok(DomainPrediction::from_scores(scored.value, threshold, scored.degraded))
}
