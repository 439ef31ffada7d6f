//! Batch analysis of the turn log joined with user ratings: rating means
//! grouped by the opening turn's initiative and by the last responder.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::engine::TurnLogRecord;
use crate::nlu::InitiativeLevel;

pub const MIN_RATING: u8 = 1;
pub const MAX_RATING: u8 = 5;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryStats {
    pub count: usize,
    pub rated: usize,
    pub unrated: usize,
    /// Share of conversations in the category that have a rating.
    pub rated_fraction: f64,
    pub mean_rating: Option<f64>,
    /// Normal-approximation 95% interval, only with two or more ratings.
    pub ci95: Option<(f64, f64)>,
}

impl CategoryStats {
    fn from_ratings(count: usize, ratings: &[f64]) -> Self {
        let rated = ratings.len();
        let mean = (rated > 0).then(|| ratings.iter().sum::<f64>() / rated as f64);
        let ci95 = match (mean, rated) {
            (Some(m), n) if n >= 2 => {
                let var = ratings.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                let half = 1.96 * var.sqrt() / (n as f64).sqrt();
                Some((m - half, m + half))
            }
            _ => None,
        };
        Self {
            count,
            rated,
            unrated: count - rated,
            rated_fraction: if count == 0 { 0.0 } else { rated as f64 / count as f64 },
            mean_rating: mean,
            ci95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticsReport {
    pub conversations: usize,
    /// Keyed by the initiative level of each conversation's first turn.
    pub by_initial_intent: BTreeMap<String, CategoryStats>,
    /// Keyed by the responder of each conversation's last turn.
    pub by_final_responder: BTreeMap<String, CategoryStats>,
    pub skipped_records: usize,
    pub rating_warnings: usize,
}

fn initiative_name(level: InitiativeLevel) -> &'static str {
    match level {
        InitiativeLevel::High => "High",
        InitiativeLevel::Low => "Low",
        InitiativeLevel::RecommendationRequest => "RecommendationRequest",
    }
}

/// `session_id,rating` rows with an optional header. Unparseable rows and
/// ratings outside 1 to 5 are counted and skipped; a repeated session keeps
/// its last rating.
pub fn parse_ratings(text: &str) -> (BTreeMap<String, u8>, usize) {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let mut ratings = BTreeMap::new();
    let mut warnings = 0;
    for (i, row) in reader.records().enumerate() {
        let Ok(row) = row else {
            warnings += 1;
            continue;
        };
        if i == 0 && row.get(1) == Some("rating") {
            continue;
        }
        match (row.get(0), row.get(1).map(str::parse::<u8>), row.len()) {
            (Some(id), Some(Ok(r)), 2) if !id.is_empty() && (MIN_RATING..=MAX_RATING).contains(&r) => {
                ratings.insert(id.to_string(), r);
            }
            _ => {
                log::warn!("ratings row {} ignored", i + 1);
                warnings += 1;
            }
        }
    }
    (ratings, warnings)
}

struct Conversation {
    first: (usize, InitiativeLevel),
    last: (usize, String),
}

/// Group the log by session and join the ratings.
pub fn analyze(log_text: &str, ratings_text: Option<&str>) -> AnalyticsReport {
    let mut skipped = 0;
    let mut sessions: BTreeMap<String, Conversation> = BTreeMap::new();
    for line in log_text.lines().filter(|l| !l.trim().is_empty()) {
        let Ok(r) = serde_json::from_str::<TurnLogRecord>(line) else {
            skipped += 1;
            continue;
        };
        let entry = sessions.entry(r.session_id.clone()).or_insert_with(|| Conversation {
            first: (r.turn_index, r.initiative),
            last: (r.turn_index, r.responder_id.to_string()),
        });
        if r.turn_index < entry.first.0 {
            entry.first = (r.turn_index, r.initiative);
        }
        if r.turn_index >= entry.last.0 {
            entry.last = (r.turn_index, r.responder_id.to_string());
        }
    }
    if skipped > 0 {
        log::warn!("{skipped} malformed log records skipped");
    }
    let (ratings, rating_warnings) = ratings_text.map(parse_ratings).unwrap_or_default();

    let mut by_intent: BTreeMap<String, (usize, Vec<f64>)> =
        InitiativeLevel::ALL.iter().map(|l| (initiative_name(*l).to_string(), (0, Vec::new()))).collect();
    let mut by_responder: BTreeMap<String, (usize, Vec<f64>)> = BTreeMap::new();
    for (id, conv) in &sessions {
        let rating = ratings.get(id).map(|r| f64::from(*r));
        for group in [
            by_intent.entry(initiative_name(conv.first.1).to_string()).or_default(),
            by_responder.entry(conv.last.1.clone()).or_default(),
        ] {
            group.0 += 1;
            group.1.extend(rating);
        }
    }
    let finish = |m: BTreeMap<String, (usize, Vec<f64>)>| {
        m.into_iter().map(|(k, (count, rs))| (k, CategoryStats::from_ratings(count, &rs))).collect()
    };
    AnalyticsReport {
        conversations: sessions.len(),
        by_initial_intent: finish(by_intent),
        by_final_responder: finish(by_responder),
        skipped_records: skipped,
        rating_warnings,
    }
}

/// [`analyze`] over files.
pub fn analyze_logs(log_path: &Path, ratings_path: Option<&Path>) -> Result<AnalyticsReport, AnalyticsError> {
    let read =
        |p: &Path| std::fs::read_to_string(p).map_err(|source| AnalyticsError::Io { path: p.display().to_string(), source });
    let log_text = read(log_path)?;
    let ratings = ratings_path.map(read).transpose()?;
    Ok(analyze(&log_text, ratings.as_deref()))
}

impl AnalyticsReport {
    pub fn render(&self) -> String {
        let mut out = format!("conversations: {}\n", self.conversations);
        for (title, groups) in [("initial intent", &self.by_initial_intent), ("final responder", &self.by_final_responder)] {
            let _ = writeln!(
                out,
                "\nby {title}\n{:<22} {:>6} {:>6} {:>8} {:>6} {:>17}",
                "category", "count", "rated", "rated%", "mean", "ci95"
            );
            for (name, s) in groups {
                let mean = s.mean_rating.map_or("-".to_string(), |m| format!("{m:.2}"));
                let ci = s.ci95.map_or("-".to_string(), |(lo, hi)| format!("[{lo:.2}, {hi:.2}]"));
                let _ = writeln!(
                    out,
                    "{name:<22} {:>6} {:>6} {:>7.1}% {mean:>6} {ci:>17}",
                    s.count,
                    s.rated,
                    100.0 * s.rated_fraction
                );
            }
        }
        let _ = writeln!(out, "\nskipped log records: {}\nrating warnings: {}", self.skipped_records, self.rating_warnings);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlu::Intent;
    use crate::state::{DialoguePhase, ResponderId};

    fn line(session: &str, index: usize, initiative: InitiativeLevel, responder: ResponderId) -> String {
        serde_json::to_string(&TurnLogRecord {
            session_id: session.into(),
            turn_index: index,
            phase: DialoguePhase::Ended,
            initiative,
            intent: Intent::Request,
            responder_id: responder,
            latency_ms: 3,
        })
        .unwrap()
    }

    #[test]
    fn two_completed_conversations() {
        let log = [
            line("a", 0, InitiativeLevel::High, ResponderId::ShowOptions),
            line("a", 1, InitiativeLevel::Low, ResponderId::TaskCompleted),
            line("b", 0, InitiativeLevel::High, ResponderId::TaskCompleted),
            line("c", 0, InitiativeLevel::Low, ResponderId::Stop),
            "not json".to_string(),
        ]
        .join("\n");
        let report = analyze(&log, Some("session_id,rating\na,5\nb,4\nzzz,9\n"));
        assert_eq!(report.conversations, 3);
        assert_eq!(report.skipped_records, 1);
        assert_eq!(report.rating_warnings, 1);
        let done = &report.by_final_responder["task-completed"];
        assert_eq!((done.count, done.mean_rating), (2, Some(4.5)));
        let stop = &report.by_final_responder["stop"];
        assert_eq!((stop.rated, stop.unrated, stop.mean_rating, stop.ci95), (0, 1, None, None));
        assert_eq!(report.by_initial_intent["High"].count, 2);
        assert_eq!(report.by_initial_intent["RecommendationRequest"].count, 0);
        assert!(report.render().contains("task-completed"));
    }

    #[test]
    fn interval_matches_hand_computation() {
        let s = CategoryStats::from_ratings(3, &[5.0, 4.0, 3.0]);
        let (lo, hi) = s.ci95.unwrap();
        assert!((lo - (4.0 - 1.96 / 3f64.sqrt())).abs() < 1e-12 && (hi - (4.0 + 1.96 / 3f64.sqrt())).abs() < 1e-12);
    }
}
