//! DIY request understanding: from a free-form utterance to three
//! Must/Should search queries.

mod commonsense;
mod entailment;
mod paraphrase;
mod queries;
mod roles;

pub use commonsense::{
    attached_object, find_problems, heuristic_commonsense, infer_commonsense, CommonsenseLexicon, CommonsenseRelation,
    ProblemHit, Remedy,
};
pub use entailment::{entailment_score, heuristic_entailment, EntailmentError, IdfTable};
pub use paraphrase::{paraphrase_howto, ParaphraseCandidate, ParaphraseError, DEFAULT_CANDIDATES};
pub use queries::{formulate_queries, QueryError, QueryFormulation, QueryKind, SearchQuery};
pub use roles::{extract_roles, PredicateArgument, RoleError};
