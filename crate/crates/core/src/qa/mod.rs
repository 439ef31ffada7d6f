//! Question answering during a task: question types, rule-based quantity
//! and substitution answers, the conversational input format, and an
//! extractive fallback over the task text.

mod eval;
mod metrics;

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::RecipeDocument;
use crate::generators::DocView;
use crate::lexicon::{parse_rows, LoadError, PhraseLexicon};
use crate::pos::{is_possessive, PosTag};
use crate::provider::{with_fallback, Provider, ProviderError, RemoteProvider, Scored};
use crate::resources::Knowledge;
use crate::retrieval::normalized_distance;
use crate::state::QaPair;
use crate::text::{stem, token_spans, tokenize};

pub use eval::{evaluate, load_eval_records, EvalError, EvalRecord, EvalReport, MetricRow};
pub use metrics::{answer_tokens, exact_match, fuzzy_match_score, normalize_answer, token_f1};

pub const UNKNOWN_ANSWER: &str = "Sorry, I don't know the answer to that.";
pub const DEFAULT_K: usize = 1;
pub const ALLOWED_K: [usize; 3] = [0, 1, 5];
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.15;
pub const DEFAULT_QUANTITY_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuestionType {
    QuantityRelated,
    TimeRelated,
    ContextDependent,
    Others,
}

impl QuestionType {
    pub const ALL: [QuestionType; 4] =
        [QuestionType::QuantityRelated, QuestionType::TimeRelated, QuestionType::ContextDependent, QuestionType::Others];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnswerSource {
    QuantityRule,
    SubstitutionRule,
    Extractive,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaAnswer {
    pub text: String,
    pub source: AnswerSource,
    pub confidence: f64,
}

impl QaAnswer {
    pub fn unknown() -> Self {
        Self { text: UNKNOWN_ANSWER.to_string(), source: AnswerSource::None, confidence: 0.0 }
    }

    pub fn is_unknown(&self) -> bool {
        self.source == AnswerSource::None
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QaError {
    #[error("history length k must be 0, 1 or 5, got {0}")]
    InvalidK(usize),
}

fn has_run(tokens: &[String], run: &[&str]) -> bool {
    tokens.windows(run.len()).any(|w| w.iter().zip(run).all(|(a, b)| a == b))
}

const PRONOUNS: &[&str] = &["it", "that", "them", "this", "those", "these", "they", "one"];

/// Quantity cues, then time cues, then a pronoun with no noun to refer to.
pub fn classify_question_type(kb: &Knowledge, question: &str) -> QuestionType {
    let tokens = tokenize(question);
    let any = |runs: &[&[&str]]| runs.iter().any(|r| has_run(&tokens, r));
    if any(&[&["how", "many"], &["how", "much"], &["quantity", "of"], &["amount", "of"], &["how", "big"]]) {
        return QuestionType::QuantityRelated;
    }
    let time_words = ["when", "minutes", "minute", "hours", "hour", "seconds", "time", "long", "soon"];
    if any(&[&["how", "long"], &["what", "time"], &["how", "soon"]])
        || tokens.iter().any(|t| time_words[..7].contains(&t.as_str()))
    {
        return QuestionType::TimeRelated;
    }
    let tags = kb.tagger.tag_tokens(&tokens);
    let has_pronoun = tokens.iter().any(|t| PRONOUNS.contains(&t.as_str()));
    let has_noun = tokens.iter().zip(&tags).any(|(t, tag)| {
        *tag == PosTag::Noun && !PRONOUNS.contains(&t.as_str()) && !kb.stopwords.contains(t) && !is_possessive(t)
    });
    if has_pronoun && !has_noun {
        return QuestionType::ContextDependent;
    }
    QuestionType::Others
}

/// Ingredient -> substitute lookup.
#[derive(Debug, Clone, Default)]
pub struct SubstitutionTable {
    lexicon: PhraseLexicon,
    substitutes: Vec<String>,
}

impl SubstitutionTable {
    /// `ingredient<TAB>substitute` lines; the first line for an ingredient wins.
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let mut terms = Vec::new();
        let mut substitutes = Vec::new();
        for row in parse_rows(text, 2)? {
            let (ingredient, substitute) = (row.fields[0].trim().to_lowercase(), row.fields[1].trim().to_string());
            if ingredient.is_empty() || substitute.is_empty() {
                return Err(LoadError::Malformed { line: row.line, message: "empty substitution field".into() });
            }
            terms.push((ingredient, 1.0));
            substitutes.push(substitute);
        }
        let lexicon = PhraseLexicon::from_terms(terms.iter().cloned());
        let substitutes = (0..lexicon.len())
            .map(|i| {
                let pos = terms.iter().position(|(t, _)| t == lexicon.term(i)).unwrap_or(i);
                substitutes[pos].clone()
            })
            .collect();
        Ok(Self { lexicon, substitutes })
    }

    pub fn len(&self) -> usize {
        self.lexicon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lexicon.is_empty()
    }

    pub fn get(&self, ingredient: &str) -> Option<&str> {
        let tokens = tokenize(ingredient);
        self.lexicon
            .find(&tokens)
            .into_iter()
            .find(|m| m.start == 0 && m.end == tokens.len())
            .map(|m| self.substitutes[m.entry].as_str())
    }
}

pub fn has_substitution_cue(question: &str) -> bool {
    let tokens = tokenize(question);
    let words = ["substitute", "substitutes", "substitution", "replace", "replacement", "swap", "alternative"];
    tokens.iter().any(|t| words.contains(&t.as_str()))
        || has_run(&tokens, &["instead", "of"])
        || has_run(&tokens, &["in", "place", "of"])
        || has_run(&tokens, &["out", "of"])
}

/// The first ingredient mentioned in the question that the table knows.
pub fn answer_substitution(question: &str, table: &SubstitutionTable) -> QaAnswer {
    let tokens = tokenize(question);
    let Some(hit) = table.lexicon.find(&tokens).into_iter().min_by_key(|m| m.start) else {
        return QaAnswer::unknown();
    };
    let ingredient = tokens[hit.start..hit.end].join(" ");
    QaAnswer {
        text: format!("You can use {} instead of {ingredient}.", table.substitutes[hit.entry]),
        source: AnswerSource::SubstitutionRule,
        confidence: 0.9,
    }
}

/// Match the questioned ingredient against the recipe by normalized edit
/// distance over question n-grams of the ingredient's length, and read back
/// the recorded quantity.
pub fn answer_quantity(kb: &Knowledge, recipe: &RecipeDocument, question: &str, threshold: f64) -> QaAnswer {
    let tokens = tokenize(question);
    let content = |t: &String| !kb.stopwords.contains(t);
    let mut best: Option<(usize, f64)> = None;
    for (i, ingredient) in recipe.ingredients.iter().enumerate() {
        let name = tokenize(&ingredient.name);
        if name.is_empty() || name.len() > tokens.len() {
            continue;
        }
        let target = name.join(" ");
        for gram in tokens.windows(name.len()) {
            if !content(&gram[0]) || !content(&gram[gram.len() - 1]) {
                continue;
            }
            let d = normalized_distance(&gram.join(" "), &target);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
    }
    let Some((i, distance)) = best.filter(|&(_, d)| d <= threshold) else {
        return QaAnswer::unknown();
    };
    let ingredient = &recipe.ingredients[i];
    let text = match ingredient.quantity.trim() {
        "" => format!("The recipe doesn't give an amount for {}.", ingredient.name),
        q => format!("You need {q} {}.", ingredient.name),
    };
    QaAnswer { text, source: AnswerSource::QuantityRule, confidence: 1.0 - distance }
}

/// Task text, earlier exchanges and the current question.
#[derive(Debug, Clone, PartialEq)]
pub struct QaContext {
    pub task_context: String,
    pub history: Vec<QaPair>,
    pub question: String,
    k: usize,
}

impl QaContext {
    pub fn new(
        task_context: impl Into<String>,
        history: Vec<QaPair>,
        question: impl Into<String>,
        k: usize,
    ) -> Result<Self, QaError> {
        if !ALLOWED_K.contains(&k) {
            return Err(QaError::InvalidK(k));
        }
        Ok(Self { task_context: task_context.into(), history, question: question.into(), k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The last `k` exchanges.
    pub fn recent_history(&self) -> &[QaPair] {
        &self.history[self.history.len().saturating_sub(self.k)..]
    }
}

/// Keep user text from forging turn markers.
fn escape_markers(text: &str) -> String {
    text.replace("Q:", "Q :").replace("A:", "A :")
}

/// Context, a newline, then `Q: q A: a ` for each of the last `k` exchanges
/// and finally `Q: question`. With `k = 0` no history appears at all.
pub fn format_conv_qa_input(ctx: &QaContext) -> String {
    let mut out = escape_markers(&ctx.task_context);
    out.push('\n');
    out.push_str(&format_turns(ctx));
    out
}

fn format_turns(ctx: &QaContext) -> String {
    let mut out = String::new();
    for pair in ctx.recent_history() {
        out.push_str(&format!("Q: {} A: {} ", escape_markers(&pair.question), escape_markers(&pair.answer)));
    }
    out.push_str(&format!("Q: {}", escape_markers(&ctx.question)));
    out
}

/// Byte ranges of the sentences in `text`, split at `.`, `!`, `?` and line
/// breaks, trimmed of surrounding whitespace.
fn sentence_spans(text: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if matches!(c, '.' | '!' | '?' | '\n') {
            spans.push(start..i + c.len_utf8());
            start = i + c.len_utf8();
        }
    }
    spans.push(start..text.len());
    spans
        .into_iter()
        .filter_map(|r| {
            let s = &text[r.clone()];
            if s.trim().is_empty() {
                return None;
            }
            let lead = s.len() - s.trim_start().len();
            let trail = s.len() - s.trim_end().len();
            let r = r.start + lead..r.end - trail;
            (!text[r.clone()].trim_matches(|c: char| !c.is_alphanumeric()).is_empty()).then_some(r)
        })
        .collect()
}

fn span_stems(text: &str, range: &Range<usize>) -> Vec<(Range<usize>, String)> {
    token_spans(&text[range.clone()])
        .into_iter()
        .map(|r| {
            let abs = range.start + r.start..range.start + r.end;
            let word = text[abs.clone()].to_lowercase();
            (abs, stem(&word))
        })
        .collect()
}

/// Sentence retrieval over the task text: sentences are scored by the idf
/// mass of query terms they contain over the idf mass of all query terms,
/// where the query is the formatted history plus question. A sentence that
/// shares a term with the current question beats one matched only through
/// history, since earlier answers tend to match their own sentence best.
/// The winner is trimmed to the clause holding its rarest matching term.
pub fn heuristic_extractive(kb: &Knowledge, ctx: &QaContext, threshold: f64) -> QaAnswer {
    let text = ctx.task_context.as_str();
    let query: Vec<String> = kb.stopwords.content_stems(&format_turns(ctx)).into_iter().filter(|s| s != "q").collect();
    let sentences = sentence_spans(text);
    if query.is_empty() || sentences.is_empty() {
        return QaAnswer::unknown();
    }
    let stems: Vec<Vec<(Range<usize>, String)>> = sentences.iter().map(|r| span_stems(text, r)).collect();
    let n = sentences.len() as f64;
    let mut df: HashMap<&str, usize> = HashMap::new();
    for sentence in &stems {
        let unique: HashSet<&str> = sentence.iter().map(|(_, s)| s.as_str()).collect();
        for s in unique {
            *df.entry(s).or_default() += 1;
        }
    }
    let idf = |s: &str| ((n + 1.0) / (df.get(s).copied().unwrap_or(0) as f64 + 1.0)).ln() + 1.0;
    let total: f64 = query.iter().map(|q| idf(q)).sum();

    let asked: HashSet<String> = kb.stopwords.content_stems(&ctx.question).into_iter().collect();
    let mut best: Option<(usize, bool, f64)> = None;
    for (i, sentence) in stems.iter().enumerate() {
        let present: HashSet<&str> = sentence.iter().map(|(_, s)| s.as_str()).collect();
        let score = query.iter().filter(|q| present.contains(q.as_str())).map(|q| idf(q)).sum::<f64>() / total;
        let answers_question = asked.iter().any(|q| present.contains(q.as_str()));
        if best.is_none_or(|(_, a, b)| (answers_question, score) > (a, b)) {
            best = Some((i, answers_question, score));
        }
    }
    let Some((i, _, score)) = best.filter(|&(_, _, s)| s > 0.0 && s >= threshold) else {
        return QaAnswer::unknown();
    };

    let sentence = &sentences[i];
    let anchor = stems[i]
        .iter()
        .filter(|(_, s)| query.contains(s))
        .fold(None::<&(Range<usize>, String)>, |best, cur| match best {
            Some(b) if idf(&b.1) >= idf(&cur.1) => Some(b),
            _ => Some(cur),
        })
        .map(|(r, _)| r.start)
        .unwrap_or(sentence.start);
    let mut clause = sentence.clone();
    for (j, c) in text[sentence.clone()].char_indices() {
        let at = sentence.start + j;
        if matches!(c, ',' | ';') {
            if at < anchor {
                clause.start = at + 1;
            } else {
                clause.end = at;
                break;
            }
        }
    }
    let raw = &text[clause.clone()];
    let trimmed = raw.trim().trim_end_matches(['.', '!', '?']).trim_end();
    let offset = clause.start + (raw.len() - raw.trim_start().len());
    let answer = &text[offset..offset + trimmed.len()];
    QaAnswer { text: answer.to_string(), source: AnswerSource::Extractive, confidence: score.min(1.0) }
}

/// Extractive answer from the remote model when configured (it receives the
/// formatted input and must return a span of the task text), otherwise or on
/// failure from the heuristic.
pub fn extractive_answer(kb: &Knowledge, ctx: &QaContext, threshold: f64, provider: &Provider) -> Scored<QaAnswer> {
    let remote = |r: &RemoteProvider| {
        let span = r.text(&format_conv_qa_input(ctx), &[])?;
        let span = span.trim();
        if span.is_empty() || !ctx.task_context.contains(span) {
            return Err(ProviderError::Malformed("answer is not a span of the task text".into()));
        }
        Ok(QaAnswer { text: span.to_string(), source: AnswerSource::Extractive, confidence: 1.0 })
    };
    with_fallback(provider, remote, || heuristic_extractive(kb, ctx, threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QaConfig {
    /// History turns in the conversational input.
    pub k: usize,
    pub overlap_threshold: f64,
    pub quantity_threshold: f64,
}

impl Default for QaConfig {
    fn default() -> Self {
        Self { k: DEFAULT_K, overlap_threshold: DEFAULT_OVERLAP_THRESHOLD, quantity_threshold: DEFAULT_QUANTITY_THRESHOLD }
    }
}

/// Answer a question about the active document: substitution rule,
/// quantity rule for recipes, then extractive.
pub fn answer_question(
    kb: &Knowledge,
    doc: DocView,
    history: &[QaPair],
    question: &str,
    config: &QaConfig,
    provider: &Provider,
) -> Result<Scored<QaAnswer>, QaError> {
    let plain = |value| Scored { value, degraded: false };
    if has_substitution_cue(question) {
        let answer = answer_substitution(question, &kb.substitutions);
        if !answer.is_unknown() {
            return Ok(plain(answer));
        }
    }
    if let DocView::Recipe(recipe) = doc {
        if classify_question_type(kb, question) == QuestionType::QuantityRelated {
            let answer = answer_quantity(kb, recipe, question, config.quantity_threshold);
            if !answer.is_unknown() {
                return Ok(plain(answer));
            }
        }
    }
    let ctx = QaContext::new(doc.context_text(), history.to_vec(), question, config.k)?;
    Ok(extractive_answer(kb, &ctx, config.overlap_threshold, provider))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Ingredient;
    use crate::provider::fake;
    use std::time::Duration;

    fn kb() -> &'static Knowledge {
        Knowledge::bundled()
    }

    #[test]
    fn question_types() {
        assert_eq!(classify_question_type(kb(), "How many eggs to make the cake?"), QuestionType::QuantityRelated);
        assert_eq!(classify_question_type(kb(), "How long does it take to steam tomatoes?"), QuestionType::TimeRelated);
        assert_eq!(classify_question_type(kb(), "Where to place it?"), QuestionType::ContextDependent);
        assert_eq!(classify_question_type(kb(), "Where do I put the pan?"), QuestionType::Others);
    }

    fn recipe() -> RecipeDocument {
        RecipeDocument {
            id: "r".into(),
            name: "Cake".into(),
            ingredients: vec![
                Ingredient { name: "flour".into(), quantity: "2 cups".into() },
                Ingredient { name: "eggs".into(), quantity: "2".into() },
                Ingredient { name: "salt".into(), quantity: "".into() },
            ],
            cuisine: None,
            meal_course: None,
            occasion: None,
            steps: vec!["Mix everything.".into()],
            popularity: 0,
        }
    }

    #[test]
    fn quantity_rule() {
        let a = answer_quantity(kb(), &recipe(), "how many eggs", DEFAULT_QUANTITY_THRESHOLD);
        assert_eq!(a.text, "You need 2 eggs.");
        assert_eq!(a.source, AnswerSource::QuantityRule);
        let a = answer_quantity(kb(), &recipe(), "how many egg do I need", DEFAULT_QUANTITY_THRESHOLD);
        assert_eq!(a.text, "You need 2 eggs.");
        assert!((a.confidence - 0.75).abs() < 1e-12);
        assert!(answer_quantity(kb(), &recipe(), "how much butter", DEFAULT_QUANTITY_THRESHOLD).is_unknown());
        assert_eq!(
            answer_quantity(kb(), &recipe(), "how much salt", DEFAULT_QUANTITY_THRESHOLD).text,
            "The recipe doesn't give an amount for salt."
        );
    }

    #[test]
    fn substitution_rule() {
        let a = answer_substitution("what can I use instead of butter", &kb().substitutions);
        assert_eq!(a.source, AnswerSource::SubstitutionRule);
        assert!(a.text.contains(kb().substitutions.get("butter").unwrap()));
        assert!(answer_substitution("what can I use instead of unobtainium", &kb().substitutions).is_unknown());
        let a = answer_substitution("can I replace the milk or swap the butter", &kb().substitutions);
        assert!(a.text.ends_with("instead of milk."), "{}", a.text);
        assert!(has_substitution_cue("what can I use instead of butter"));
        assert!(!has_substitution_cue("how many eggs"));
    }

    fn pairs(n: usize) -> Vec<QaPair> {
        (0..n).map(|i| QaPair { question: format!("q{i}"), answer: format!("a{i}") }).collect()
    }

    #[test]
    fn conversational_format() {
        let ctx = QaContext::new("Crack the eggs.", pairs(3), "how many eggs", 0).unwrap();
        assert_eq!(format_conv_qa_input(&ctx), "Crack the eggs.\nQ: how many eggs");
        let ctx = QaContext::new("C", pairs(3), "q", 1).unwrap();
        assert_eq!(format_conv_qa_input(&ctx), "C\nQ: q2 A: a2 Q: q");
        let ctx = QaContext::new("C", pairs(2), "q", 5).unwrap();
        assert_eq!(format_conv_qa_input(&ctx), "C\nQ: q0 A: a0 Q: q1 A: a1 Q: q");
        assert_eq!(QaContext::new("C", vec![], "q", 2), Err(QaError::InvalidK(2)));
        let ctx = QaContext::new("PASTA: boil it", vec![], "Q: what A: this", 0).unwrap();
        let s = format_conv_qa_input(&ctx);
        assert_eq!((s.matches("Q:").count(), s.matches("A:").count()), (1, 0));
    }

    #[test]
    fn extractive_examples() {
        let ctx = QaContext::new("Bake for 25 minutes at 350 degrees.", vec![], "how long do I bake", 1).unwrap();
        let a = heuristic_extractive(kb(), &ctx, DEFAULT_OVERLAP_THRESHOLD);
        assert!(a.text.contains("25 minutes"), "{a:?}");
        assert!(ctx.task_context.contains(&a.text));

        let ctx = QaContext::new("Bake for 25 minutes at 350 degrees.", vec![], "who won the football match", 1).unwrap();
        assert!(heuristic_extractive(kb(), &ctx, DEFAULT_OVERLAP_THRESHOLD).is_unknown());

        let context = "Mix the flour and water.\nKnead the dough for ten minutes.\nPlace the dough in a greased bowl, then cover it with a towel.\nWait one hour.";
        let history = vec![QaPair { question: "What do I knead?".into(), answer: "Knead the dough for ten minutes".into() }];
        let ctx = QaContext::new(context, history, "where to place it", 1).unwrap();
        let a = heuristic_extractive(kb(), &ctx, DEFAULT_OVERLAP_THRESHOLD);
        assert_eq!(a.text, "Place the dough in a greased bowl");
    }

    #[test]
    fn remote_extractive_must_return_a_span() {
        let ctx = QaContext::new("Bake for 25 minutes at 350 degrees.", vec![], "how long do I bake", 1).unwrap();
        let good = Provider::remote(fake::serve(r#"{"texts":["25 minutes"]}"#, 1), Duration::from_secs(2));
        let a = extractive_answer(kb(), &ctx, DEFAULT_OVERLAP_THRESHOLD, &good);
        assert_eq!((a.value.text.as_str(), a.degraded), ("25 minutes", false));
        let bad = Provider::remote(fake::serve(r#"{"texts":["an hour"]}"#, 1), Duration::from_secs(2));
        assert!(extractive_answer(kb(), &ctx, DEFAULT_OVERLAP_THRESHOLD, &bad).degraded);
        let dead = Provider::remote(fake::dead_endpoint(), Duration::from_millis(200));
        let a = extractive_answer(kb(), &ctx, DEFAULT_OVERLAP_THRESHOLD, &dead);
        assert!(a.degraded && a.value.text.contains("25 minutes"));
    }
}
