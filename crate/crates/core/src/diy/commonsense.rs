//! Problem-to-remedy inference standing in for a commonsense model.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::lexicon::{parse_rows, LoadError};
use crate::pos::{is_auxiliary, is_determiner, PosTag};
use crate::provider::{with_fallback, Provider, Scored};
use crate::resources::Knowledge;
use crate::text::{indefinite_article, stem, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommonsenseRelation {
    XWant,
    XIntent,
}

impl CommonsenseRelation {
    pub fn gloss(self) -> &'static str {
        match self {
            CommonsenseRelation::XWant => "As a result, PersonX wants",
            CommonsenseRelation::XIntent => "PersonX then",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CommonsenseRelation::XWant => "xWant",
            CommonsenseRelation::XIntent => "xIntent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Remedy {
    pub problem: String,
    pub remedy: String,
    /// State the user is after, e.g. "fixed" or "nice".
    pub desired: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct CommonsenseLexicon {
    entries: Vec<Remedy>,
    by_stem: HashMap<String, Vec<usize>>,
    generalizations: HashMap<String, String>,
}

impl CommonsenseLexicon {
    /// `problem<TAB>remedy[<TAB>desired]` rows plus `noun<TAB>general` rows.
    pub fn parse(remedies: &str, generalizations: &str) -> Result<Self, LoadError> {
        let mut lexicon = Self::default();
        for row in parse_rows(remedies, 2)? {
            let entry = Remedy {
                problem: row.fields[0].to_lowercase(),
                remedy: row.fields[1].to_lowercase(),
                desired: row.fields.get(2).filter(|d| !d.is_empty()).map(|d| d.to_lowercase()),
            };
            lexicon.by_stem.entry(stem(&entry.problem)).or_default().push(lexicon.entries.len());
            lexicon.entries.push(entry);
        }
        for row in parse_rows(generalizations, 2)? {
            lexicon.generalizations.insert(row.fields[0].to_lowercase(), row.fields[1].to_lowercase());
        }
        Ok(lexicon)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_problem_term(&self, token: &str) -> bool {
        self.by_stem.contains_key(&stem(token))
    }

    /// Remedies for a problem token, most preferred first.
    pub fn remedies(&self, token: &str) -> Vec<&Remedy> {
        self.by_stem.get(&stem(token)).map(|ids| ids.iter().map(|&i| &self.entries[i]).collect()).unwrap_or_default()
    }

    /// Stems of the remedy verbs for a problem stem.
    pub fn remedy_stems(&self, problem_stem: &str) -> Vec<String> {
        self.by_stem.get(problem_stem).map(|ids| ids.iter().map(|&i| stem(&self.entries[i].remedy)).collect()).unwrap_or_default()
    }

    /// A broader noun for phrasing goals ("bedroom" becomes "room").
    pub fn generalize<'a>(&'a self, noun: &'a str) -> &'a str {
        self.generalizations.get(noun).map(String::as_str).unwrap_or(noun)
    }
}

/// A problem term found in an utterance.
#[derive(Debug, Clone)]
pub struct ProblemHit<'a> {
    pub index: usize,
    pub remedies: Vec<&'a Remedy>,
    /// Token index of the noun the problem is about.
    pub object: Option<usize>,
}

const LINKING: &[&str] =
    &["got", "get", "gets", "getting", "looks", "look", "seems", "seem", "feels", "feel", "keeps", "became", "become"];
const LOCATIVES: &[&str] = &["in", "on", "of", "under", "behind", "around"];

/// The noun a problem term at `i` describes, if any.
///
/// Looks right for the noun phrase the term modifies ("broken roof", "hole
/// in the wall"), then left across a copula ("roof is broken").
pub fn attached_object(tokens: &[String], tags: &[PosTag], i: usize) -> Option<usize> {
    let last_noun_of_run = |start: usize| {
        let mut last = None;
        let mut j = start;
        while j < tokens.len() && matches!(tags[j], PosTag::Noun | PosTag::Adjective) {
            if tags[j] == PosTag::Noun {
                last = Some(j);
            }
            j += 1;
        }
        last
    };

    let mut right = i + 1;
    if tags[i] == PosTag::Noun {
        if right < tokens.len() && LOCATIVES.contains(&tokens[right].as_str()) {
            right += 1;
            while right < tokens.len() && is_determiner(&tokens[right]) {
                right += 1;
            }
        } else {
            right = tokens.len();
        }
    }
    if let Some(noun) = (right < tokens.len()).then(|| last_noun_of_run(right)).flatten() {
        return Some(noun);
    }

    let mut j = i;
    while j > 0 {
        j -= 1;
        let t = tokens[j].as_str();
        if tags[j] == PosTag::Noun {
            return Some(j);
        }
        let skippable =
            is_auxiliary(t) || LINKING.contains(&t) || tags[j] == PosTag::Adverb || (tags[i] == PosTag::Noun && is_determiner(t));
        if !skippable {
            break;
        }
    }
    None
}

/// Every problem term in the tagged utterance, left to right.
pub fn find_problems<'a>(lexicon: &'a CommonsenseLexicon, tokens: &[String], tags: &[PosTag]) -> Vec<ProblemHit<'a>> {
    (0..tokens.len())
        .filter_map(|i| {
            let remedies = lexicon.remedies(&tokens[i]);
            (!remedies.is_empty()).then(|| ProblemHit { index: i, remedies, object: attached_object(tokens, tags, i) })
        })
        .collect()
}

/// Local inference: the first problem term decides the remedy and goal.
///
/// `XWant` gives "how to <remedy> the <object>" (or "how to <remedy>" when
/// the problem is not attached to a noun). `XIntent` gives "to have a
/// <desired state> <object>", using the general form of the object or of
/// the last noun. Either is empty when no problem term appears.
pub fn heuristic_commonsense(kb: &Knowledge, utterance: &str, relation: CommonsenseRelation) -> String {
    let tokens = tokenize(utterance);
    let tags = kb.tagger.tag_tokens(&tokens);
    let hits = find_problems(&kb.commonsense, &tokens, &tags);
    let Some(hit) = hits.first() else {
        return String::new();
    };
    let remedy = hit.remedies[0];
    let object = hit.object.map(|o| tokens[o].as_str());
    match relation {
        CommonsenseRelation::XWant => match object {
            Some(o) => format!("how to {} the {o}", remedy.remedy),
            None => format!("how to {}", remedy.remedy),
        },
        CommonsenseRelation::XIntent => {
            let desired = remedy.desired.as_deref().unwrap_or(&remedy.remedy);
            if desired.contains(' ') {
                return format!("to have {desired}");
            }
            let last_noun = (0..tokens.len()).rev().find(|&i| tags[i] == PosTag::Noun && i != hit.index);
            match hit.object.or(last_noun) {
                Some(o) => {
                    let noun = kb.commonsense.generalize(&tokens[o]);
                    format!("to have {} {desired} {noun}", indefinite_article(desired))
                }
                None => format!("to be {desired}"),
            }
        }
    }
}

/// Commonsense inference through `provider`, falling back to the lexicon.
pub fn infer_commonsense(kb: &Knowledge, utterance: &str, relation: CommonsenseRelation, provider: &Provider) -> Scored<String> {
    with_fallback(
        provider,
        |remote| remote.text(utterance, &[relation.name().to_string()]),
        || heuristic_commonsense(kb, utterance, relation),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn infer(utterance: &str, relation: CommonsenseRelation) -> String {
        heuristic_commonsense(Knowledge::bundled(), utterance, relation)
    }

    #[test]
    fn examples() {
        use CommonsenseRelation::*;
        assert_eq!(infer("My roof is broken.", XWant), "how to fix the roof");
        assert_eq!(infer("how tall can nice my bedroom", XIntent), "to have a nice room");
        assert_eq!(infer("how tall can nice my bedroom", XWant), "how to decorate");
    }

    #[test]
    fn attachment() {
        use CommonsenseRelation::*;
        assert_eq!(infer("the kitchen sink is clogged", XWant), "how to unclog the sink");
        assert_eq!(infer("there is a hole in the wall", XWant), "how to patch the wall");
        assert_eq!(infer("a squeaky door", XWant), "how to fix the door");
        assert_eq!(infer("I'm hungry", XIntent), "to have a meal");
        assert_eq!(infer("what a lovely day", XWant), "");
    }

    #[test]
    fn remedy_stems_cover_all_entries() {
        let lex = &Knowledge::bundled().commonsense;
        let stems = lex.remedy_stems(&stem("broken"));
        assert!(stems.contains(&"fix".to_string()) && stems.contains(&"repair".to_string()));
        assert!(lex.len() >= 80);
        assert_eq!(lex.generalize("bedroom"), "room");
    }
}
