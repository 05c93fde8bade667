//! Knowledge-graph driven 20 Questions over a movie catalog.

pub mod arena;
pub mod belief;
pub mod catalog;
pub mod engine;
pub mod kgraph;
pub mod level;
pub mod scoring;

pub use arena::{BatchConfig, RunMetrics, Strategy};
pub use belief::{Answer, AnswerSignal, Belief, BeliefError};
pub use catalog::{Catalog, CatalogError, MovieRecord, PreprocessOptions};
pub use engine::{EngineConfig, EngineError, GuessList, Knowledge, Phase, Question, SessionState};
pub use kgraph::{Entity, GraphError, IndexPair, LearnedStats};
pub use level::{Layer, Level};
pub use scoring::{EstimatorConfig, ScoreBreakdown, ScoringError};
