//! A three-phase task-oriented dialogue engine for DIY projects and cooking
//! recipes.
//!
//! A conversation moves from goal elicitation, through choosing one of the
//! retrieved options, to step-by-step instructions with navigation and
//! question answering. Every model-backed decision has a deterministic local
//! heuristic, and a remote JSON endpoint can be configured in its place.
//!
//! ```
//! use taskbot_core::{ChatRequest, Config, Engine};
//!
//! let engine = Engine::in_memory(Config::default()).unwrap();
//! let reply = engine
//!     .handle_chat(&ChatRequest { session_id: "demo".into(), text: "I want to make lemon pie".into() })
//!     .unwrap();
//! assert_eq!(reply.phase.name(), "Selection");
//! assert!(!reply.options.is_empty());
//! ```

pub mod analytics;
pub mod config;
pub mod corpus;
pub mod dialogue;
pub mod diy;
pub mod engine;
pub mod generators;
pub mod lexicon;
pub mod nlu;
pub mod pos;
pub mod provider;
pub mod qa;
pub mod recipe;
pub mod repl;
pub mod resources;
pub mod retrieval;
pub mod state;
pub mod store;
pub mod text;

pub use config::Config;
pub use engine::{ChatError, ChatRequest, ChatResponse, Engine, Pipeline};
pub use resources::Knowledge;
pub use state::{ConversationState, DialoguePhase, ResponderId};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conversations.md")]
    mod conversations {}
    #[doc = include_str!("../../../book/src/understanding.md")]
    mod understanding {}
    #[doc = include_str!("../../../book/src/retrieval.md")]
    mod retrieval {}
    #[doc = include_str!("../../../book/src/qa.md")]
    mod qa {}
    #[doc = include_str!("../../../book/src/service.md")]
    mod service {}
    #[doc = include_str!("../../../book/src/analytics.md")]
    mod analytics {}
}
