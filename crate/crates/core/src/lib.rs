//! Structural knowledge editing for multi-hop question answering.
//!
//! A question is answered in two halves. First a language-model oracle writes
//! a triple-structured reasoning chain from its own (possibly outdated)
//! knowledge; only the source entity and the relation sequence survive
//! extraction. Then the answer is refilled by walking an up-to-date
//! [`KnowledgeStructure`], matching the source entity and selecting one
//! relation per hop.
//!
//! Module map:
//!
//! - [`store`]: triples, counterfactual edits, indexed traversal, brute-force paths
//! - [`oracle`]: oracle contract, scripted/recording/remote implementations
//! - [`chain`]: chain generation, parsing and skeleton extraction
//! - [`matcher`]: candidate queries, lexical scoring, entity/relation alignment
//! - [`pipeline`]: end-to-end inference and the given-skeleton mode
//! - [`baseline`]: in-context editing comparison arm
//! - [`harness`]: dataset ingestion, edit memories, evaluation reports
//! - [`synthetic`]: seeded generators for structures, walks and cases
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod baseline;
pub mod chain;
mod error;
pub mod harness;
pub mod matcher;
pub mod oracle;
pub mod pipeline;
pub mod store;
pub mod synthetic;
pub mod text;

pub use baseline::{baseline_answer, retrieve_edits, EditMemory};
pub use chain::{
    extract_skeleton, generate_chain, parse_chain_text, parse_skeleton_text, render_chain,
    ExtractionMode, PromptTemplateSet, ReasoningChain, ReasoningSkeleton,
};
pub use error::{Error, Result};
pub use matcher::{
    lexical_score, match_entity, parse_selection, render_candidate_query, select_relation,
    CandidateKind, CandidateQuery, MatchMethod, MatchResult, MatchStrategy, MatcherConfig,
};
pub use oracle::{
    Oracle, OracleConfig, OracleRequest, OracleResponse, RecordingOracle, RemoteOracle,
    ScriptedOracle,
};
pub use pipeline::{
    answer_from_skeleton, answer_question, infer_path, AnswerStatus, FailureReason, FanoutPolicy,
    PipelineAnswer, PipelineConfig, StageTrace, Timing,
};
pub use store::{
    EditOperation, EntityId, FactTriple, KnowledgeStructure, ReasoningPath, RelationLabel,
};
