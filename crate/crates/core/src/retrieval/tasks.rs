//! Must/Should search over DIY task documents.

use std::collections::{HashMap, HashSet};

use crate::corpus::TaskDocument;
use crate::diy::{heuristic_entailment, QueryKind, SearchQuery};
use crate::resources::Knowledge;
use crate::text::stems;

use super::{sort_ranked, RankedResult, ResultSource, RetrievalError};

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;
pub const MUST_TITLE_BONUS: f64 = 2.0;

#[derive(Debug, Clone)]
struct IndexedTask {
    title_stems: HashSet<String>,
    term_freq: HashMap<String, usize>,
    length: usize,
}

/// Immutable index over a task corpus.
#[derive(Debug, Clone, Default)]
pub struct TaskIndex {
    docs: Vec<TaskDocument>,
    indexed: Vec<IndexedTask>,
    doc_freq: HashMap<String, usize>,
    avg_length: f64,
}

impl TaskIndex {
    pub fn build(docs: Vec<TaskDocument>) -> Self {
        let mut doc_freq: HashMap<String, usize> = HashMap::new();
        let indexed: Vec<IndexedTask> = docs
            .iter()
            .map(|d| {
                let mut body = stems(&d.title);
                for step in &d.steps {
                    body.extend(stems(step));
                }
                let mut term_freq: HashMap<String, usize> = HashMap::new();
                for s in &body {
                    *term_freq.entry(s.clone()).or_default() += 1;
                }
                for s in term_freq.keys() {
                    *doc_freq.entry(s.clone()).or_default() += 1;
                }
                IndexedTask { title_stems: stems(&d.title).into_iter().collect(), term_freq, length: body.len() }
            })
            .collect();
        let avg_length =
            if docs.is_empty() { 0.0 } else { indexed.iter().map(|d| d.length as f64).sum::<f64>() / docs.len() as f64 };
        Self { docs, indexed, doc_freq, avg_length }
    }

    pub fn docs(&self) -> &[TaskDocument] {
        &self.docs
    }

    pub fn get(&self, id: &str) -> Option<&TaskDocument> {
        self.docs.iter().find(|d| d.id == id)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    fn bm25(&self, doc: &IndexedTask, term: &str) -> f64 {
        let tf = doc.term_freq.get(term).copied().unwrap_or(0) as f64;
        if tf == 0.0 {
            return 0.0;
        }
        let n = self.docs.len() as f64;
        let df = self.doc_freq.get(term).copied().unwrap_or(0) as f64;
        let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
        let norm = BM25_K1 * (1.0 - BM25_B + BM25_B * doc.length as f64 / self.avg_length);
        idf * tf * (BM25_K1 + 1.0) / (tf + norm)
    }
}

/// Documents containing every must term, scored by BM25 over the should
/// terms plus a bonus for each must term in the title.
pub fn search_tasks(query: &SearchQuery, index: &TaskIndex) -> Result<Vec<RankedResult>, RetrievalError> {
    if query.must_terms.is_empty() {
        return Err(RetrievalError::EmptyMust);
    }
    let must: Vec<Vec<String>> = query.must_terms.iter().map(|t| stems(t)).filter(|s| !s.is_empty()).collect();
    if must.is_empty() {
        return Err(RetrievalError::EmptyMust);
    }
    let mut should: Vec<String> = query.should_terms.iter().flat_map(|t| stems(t)).collect();
    should.sort();
    should.dedup();

    let mut results = Vec::new();
    for (doc, indexed) in index.docs.iter().zip(&index.indexed) {
        if !must.iter().all(|m| m.iter().all(|s| indexed.term_freq.contains_key(s))) {
            continue;
        }
        let in_title = must.iter().filter(|m| m.iter().all(|s| indexed.title_stems.contains(s))).count();
        let score = should.iter().map(|s| index.bm25(indexed, s)).sum::<f64>() + MUST_TITLE_BONUS * in_title as f64;
        results.push(RankedResult { doc_id: doc.id.clone(), score, source: ResultSource::Query(query.kind) });
    }
    sort_ranked(&mut results);
    Ok(results)
}

/// Run the three DIY queries, keep the top two of each, merge duplicates at
/// their best score, then rerank everything by how well the title is
/// entailed by the utterance.
pub fn retrieve_diy(kb: &Knowledge, utterance: &str, index: &TaskIndex) -> Vec<RankedResult> {
    let Ok(formulation) = crate::diy::formulate_queries(kb, utterance) else {
        return Vec::new();
    };
    retrieve_with_queries(kb, utterance, &formulation.queries, index)
}

pub fn retrieve_with_queries(kb: &Knowledge, utterance: &str, queries: &[SearchQuery], index: &TaskIndex) -> Vec<RankedResult> {
    let mut pooled: Vec<RankedResult> = Vec::new();
    for query in queries {
        let Ok(hits) = search_tasks(query, index) else {
            continue;
        };
        for hit in hits.into_iter().take(2) {
            match pooled.iter_mut().find(|p| p.doc_id == hit.doc_id) {
                Some(existing) => {
                    if hit.score > existing.score
                        || (hit.score == existing.score && kind_order(&hit.source) < kind_order(&existing.source))
                    {
                        *existing = hit;
                    }
                }
                None => pooled.push(hit),
            }
        }
    }
    for result in &mut pooled {
        let title = index.get(&result.doc_id).map(|d| d.title.as_str()).unwrap_or_default();
        result.score = heuristic_entailment(kb, utterance, title).unwrap_or(0.0);
    }
    sort_ranked(&mut pooled);
    pooled
}

fn kind_order(source: &ResultSource) -> u8 {
    match source {
        ResultSource::Query(QueryKind::ActionCentric) => 0,
        ResultSource::Query(QueryKind::ObjectCentric) => 1,
        ResultSource::Query(QueryKind::IntentFallback) => 2,
        _ => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(id: &str, title: &str, steps: &[&str]) -> TaskDocument {
        TaskDocument {
            id: id.into(),
            title: title.into(),
            steps: steps.iter().map(|s| s.to_string()).collect(),
            tools: vec![],
            summary: String::new(),
            popularity: 0,
        }
    }

    fn q(must: &[&str], should: &[&str]) -> SearchQuery {
        SearchQuery::new(
            QueryKind::ActionCentric,
            must.iter().map(|s| s.to_string()).collect(),
            should.iter().map(|s| s.to_string()).collect(),
        )
    }

    #[test]
    fn must_filters() {
        let index = TaskIndex::build(vec![
            task("roof", "How to Repair a Roof", &["Replace the shingles."]),
            task("bread", "How to Bake Bread", &["Knead the dough."]),
        ]);
        let ids: Vec<String> = search_tasks(&q(&["roof"], &[]), &index).unwrap().into_iter().map(|r| r.doc_id).collect();
        assert_eq!(ids, ["roof"]);
        assert!(search_tasks(&q(&["zzz"], &[]), &index).unwrap().is_empty());
        assert_eq!(search_tasks(&q(&[], &["roof"]), &index), Err(RetrievalError::EmptyMust));
    }

    #[test]
    fn should_terms_rank() {
        let index = TaskIndex::build(vec![
            task("bike", "How to Fix a Bike", &["Flip the bike over.", "Fix the chain."]),
            task("roof", "How to Fix a Roof", &["Climb up to the roof.", "Fix the shingles."]),
            task("bread", "How to Bake Bread", &["Knead the dough."]),
        ]);
        let results = search_tasks(&q(&["fix"], &["roof"]), &index).unwrap();
        assert_eq!(results[0].doc_id, "roof");
        assert_eq!(results[1].doc_id, "bike");
        assert!(results[0].score > results[1].score);
        assert_eq!(results.len(), 2);
    }

    #[test]
    fn broken_roof_ranks_roof_repair_first() {
        let kb = Knowledge::bundled();
        let results = retrieve_diy(kb, "My roof is broken", &kb.tasks);
        assert_eq!(results[0].doc_id, "task-repair-roof", "{results:?}");
        assert!(results.len() <= 6);
    }

    #[test]
    fn title_as_utterance_scores_one() {
        let kb = Knowledge::bundled();
        let results = retrieve_diy(kb, "How to Plant a Vegetable Garden", &kb.tasks);
        assert_eq!(results[0].doc_id, "task-plant-vegetable-garden");
        assert_eq!(results[0].score, 1.0);
    }

    #[test]
    fn empty_corpus_gives_nothing() {
        let kb = Knowledge::bundled();
        assert!(retrieve_diy(kb, "My roof is broken", &TaskIndex::build(vec![])).is_empty());
    }
}
