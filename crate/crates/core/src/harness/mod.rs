//! Dataset ingestion, edit memories and evaluation reports.

mod config;
mod dataset;
mod evaluate;
mod memory;
mod report;

pub use config::{AnswerRule, HarnessConfig, MemoryMode, System};
pub use dataset::{
    load_mquake, parse_mquake, parse_mquake_value, LoadedDataset, MultiHopCase, SkippedCase,
};
pub use evaluate::{answer_is_correct, evaluate_case, run_evaluation};
pub use memory::{build_edit_memory, edited_cases, memory_for};
pub use report::{
    CaseRecord, EvaluationReport, LatencyStats, LatencySummary, QuestionRecord, OUTCOME_CORRECT,
    OUTCOME_WRONG, REPORT_VERSION,
};

use std::collections::BTreeMap;

/// Number of cases per gold hop count.
pub fn hop_histogram(cases: &[MultiHopCase]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for c in cases {
        *h.entry(c.hop_count).or_insert(0) += 1;
    }
    h
}
