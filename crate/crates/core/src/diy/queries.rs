//! Three Must/Should search queries for a DIY utterance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::commonsense::{heuristic_commonsense, CommonsenseRelation};
use super::paraphrase::{paraphrase_howto, ParaphraseCandidate, DEFAULT_CANDIDATES};
use super::roles::{extract_roles, PredicateArgument, RoleError};
use crate::pos::{is_auxiliary, PosTag};
use crate::resources::Knowledge;
use crate::text::{stem, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryKind {
    ActionCentric,
    ObjectCentric,
    IntentFallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub kind: QueryKind,
    pub must_terms: Vec<String>,
    pub should_terms: Vec<String>,
}

impl SearchQuery {
    /// Drops duplicates and any should term sharing a stem with a must term.
    pub fn new(kind: QueryKind, must: Vec<String>, should: Vec<String>) -> Self {
        let must_terms = dedup_by_stem(must, &[]);
        let should_terms = dedup_by_stem(should, &must_terms);
        Self { kind, must_terms, should_terms }
    }
}

fn dedup_by_stem(terms: Vec<String>, exclude: &[String]) -> Vec<String> {
    let mut seen: Vec<String> = exclude.iter().map(|t| stem(t)).collect();
    let mut out = Vec::new();
    for t in terms {
        let s = stem(&t);
        if !t.is_empty() && !seen.contains(&s) {
            seen.push(s);
            out.push(t);
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("utterance has no searchable words")]
    NoSearchTerms,
}

/// Everything derived while formulating, kept for logging and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryFormulation {
    pub paraphrases: Vec<ParaphraseCandidate>,
    pub roles: Result<PredicateArgument, RoleError>,
    pub intent_goal: String,
    pub queries: Vec<SearchQuery>,
}

/// Action-centric, object-centric and goal-based queries, built from the
/// roles of the top paraphrase and the inferred goal.
///
/// Without a main verb the action-centric slot holds a second
/// object-centric query whose should set also takes the content words of
/// every paraphrase.
pub fn formulate_queries(kb: &Knowledge, utterance: &str) -> Result<QueryFormulation, QueryError> {
    let paraphrases = paraphrase_howto(kb, utterance, DEFAULT_CANDIDATES).map_err(|_| QueryError::NoSearchTerms)?;
    let top = &paraphrases[0].text;
    let roles = extract_roles(kb, top);
    let intent_goal = heuristic_commonsense(kb, utterance, CommonsenseRelation::XIntent);

    let utterance_tokens = tokenize(utterance);
    let utterance_tags = kb.tagger.tag_tokens(&utterance_tokens);
    let last_noun = (0..utterance_tokens.len())
        .rev()
        .find(|&i| utterance_tags[i] == PosTag::Noun && !kb.stopwords.contains(&utterance_tokens[i]))
        .map(|i| utterance_tokens[i].clone());
    let content: Vec<String> = kb.stopwords.content_tokens(utterance);

    let (action, object, remainder, object_must) = match &roles {
        Ok(r) => {
            let head = (!r.arg1_head_noun.is_empty()).then(|| r.arg1_head_noun.clone());
            let object_must = head.clone().or(last_noun.clone()).unwrap_or_else(|| r.verb.clone());
            let mut action_should: Vec<String> = head.into_iter().collect();
            action_should.extend(r.remainder_terms.iter().cloned());
            let action = SearchQuery::new(QueryKind::ActionCentric, vec![r.verb.clone()], action_should);
            let mut object_should = vec![r.verb.clone()];
            object_should.extend(r.remainder_terms.iter().cloned());
            let object = SearchQuery::new(QueryKind::ObjectCentric, vec![object_must.clone()], object_should);
            (action, object, r.remainder_terms.clone(), object_must)
        }
        Err(_) => {
            let object_must = last_noun.clone().or_else(|| content.first().cloned()).ok_or(QueryError::NoSearchTerms)?;
            let remainder: Vec<String> = kb.stopwords.content_tokens(top).into_iter().filter(|t| *t != object_must).collect();
            let object = SearchQuery::new(QueryKind::ObjectCentric, vec![object_must.clone()], remainder.clone());
            let mut widened = remainder.clone();
            for p in &paraphrases {
                widened.extend(kb.stopwords.content_tokens(&p.text));
            }
            widened.extend(content.iter().cloned());
            let duplicate = SearchQuery::new(QueryKind::ObjectCentric, vec![object_must.clone()], widened);
            (duplicate, object, remainder, object_must)
        }
    };

    let goal_tokens = tokenize(&intent_goal);
    let goal_tags = kb.tagger.tag_tokens(&goal_tokens);
    let goal_nouns: Vec<String> = goal_tokens
        .iter()
        .zip(&goal_tags)
        .filter(|(t, tag)| **tag == PosTag::Noun && !kb.stopwords.contains(t))
        .map(|(t, _)| t.clone())
        .collect();
    let goal_other: Vec<String> = goal_tokens
        .iter()
        .zip(&goal_tags)
        .filter(|(t, tag)| **tag != PosTag::Noun && !kb.stopwords.contains(t) && !is_auxiliary(t))
        .map(|(t, _)| t.clone())
        .collect();
    let (fallback_must, mut fallback_should) =
        if goal_nouns.is_empty() { (vec![object_must], Vec::new()) } else { (goal_nouns, goal_other) };
    fallback_should.extend(remainder);
    let fallback = SearchQuery::new(QueryKind::IntentFallback, fallback_must, fallback_should);

    Ok(QueryFormulation { paraphrases, roles, intent_goal, queries: vec![action, object, fallback] })
}
