//! Engine configuration, read from one TOML document. Every field has a
//! default, so an empty file is a valid configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::{RankerTiers, TierError};
use crate::generators::{OptionsConfig, PersonaConfig, DEFAULT_FUN_FACT_THRESHOLD};
use crate::provider::Provider;
use crate::qa::{QaConfig, ALLOWED_K};
use crate::retrieval::DEFAULT_CONFIRM_THRESHOLD;
use crate::state::MAX_SOCIAL_TURNS;

pub const DEFAULT_DOMAIN_THRESHOLD: f64 = 0.5;
pub const MAX_UTTERANCE_CHARS: usize = 1024;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Tiers(#[from] TierError),
    #[error("{name} must lie in [0, 1], got {value}")]
    Threshold { name: &'static str, value: f64 },
    #[error("qa.k must be one of 0, 1, 5, got {0}")]
    QaK(usize),
    #[error("persona.max_social_turns may not exceed {MAX_SOCIAL_TURNS}")]
    SocialTurns,
    #[error("options.presented must be at least 1")]
    NoOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Minimum entailment score for a confident domain label.
    pub domain: f64,
    /// Normalized edit distance above which a selection is confirmed first.
    pub confirmation: f64,
    pub fun_fact: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { domain: DEFAULT_DOMAIN_THRESHOLD, confirmation: DEFAULT_CONFIRM_THRESHOLD, fun_fact: DEFAULT_FUN_FACT_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankerConfig {
    /// Responder id to tier; lower wins.
    pub tiers: BTreeMap<String, u32>,
}

impl Default for RankerConfig {
    fn default() -> Self {
        Self { tiers: RankerTiers::default().to_map() }
    }
}

/// Remote model endpoints. Anything left unset uses the local heuristic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    pub domain: Option<String>,
    pub generative: Option<String>,
    pub extractive: Option<String>,
    pub timeout_ms: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self { domain: None, generative: None, extractive: None, timeout_ms: 2000 }
    }
}

/// The providers built from a [`ProviderConfig`].
#[derive(Debug, Clone, Default)]
pub struct Providers {
    pub domain: Provider,
    pub generative: Provider,
    pub extractive: Provider,
}

impl ProviderConfig {
    pub fn build(&self) -> Providers {
        let timeout = Duration::from_millis(self.timeout_ms);
        let make = |endpoint: &Option<String>| match endpoint {
            Some(url) => Provider::remote(url.clone(), timeout),
            None => Provider::Heuristic,
        };
        Providers { domain: make(&self.domain), generative: make(&self.generative), extractive: make(&self.extractive) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Directory whose files replace the bundled corpora and lexicons.
    pub corpus_dir: Option<PathBuf>,
    /// Line-delimited JSON turn log.
    pub log_path: Option<PathBuf>,
    /// Where conversation states are kept; in memory when unset.
    pub state_dir: Option<PathBuf>,
    pub thresholds: Thresholds,
    pub qa: QaConfig,
    pub ranker: RankerConfig,
    pub persona: PersonaConfig,
    pub options: OptionsConfig,
    pub providers: ProviderConfig,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.thresholds;
        for (name, value) in [
            ("thresholds.domain", t.domain),
            ("thresholds.confirmation", t.confirmation),
            ("thresholds.fun_fact", t.fun_fact),
            ("qa.overlap_threshold", self.qa.overlap_threshold),
            ("qa.quantity_threshold", self.qa.quantity_threshold),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Threshold { name, value });
            }
        }
        if !ALLOWED_K.contains(&self.qa.k) {
            return Err(ConfigError::QaK(self.qa.k));
        }
        if self.persona.max_social_turns > MAX_SOCIAL_TURNS {
            return Err(ConfigError::SocialTurns);
        }
        if self.options.presented == 0 {
            return Err(ConfigError::NoOptions);
        }
        self.tiers()?;
        Ok(())
    }

    pub fn tiers(&self) -> Result<RankerTiers, TierError> {
        RankerTiers::from_map(&self.ranker.tiers)
    }
}
