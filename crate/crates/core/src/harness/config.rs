use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::baseline::DEFAULT_RETRIEVAL_K;
use crate::error::{Error, Result};
use crate::pipeline::PipelineConfig;

/// Which edited facts a question gets to see.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryMode {
    /// Only the focus case's edited chain.
    RelevantOnly,
    /// Every case's facts with every case's rewrites applied.
    Full,
    /// Like `Full`, but only `n` cases (the focus case plus a seeded sample)
    /// contribute edits.
    FixedCount(usize),
}

impl fmt::Display for MemoryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoryMode::RelevantOnly => f.write_str("relevant"),
            MemoryMode::Full => f.write_str("full"),
            MemoryMode::FixedCount(n) => write!(f, "count:{n}"),
        }
    }
}

impl FromStr for MemoryMode {
    type Err = Error;

    /// `relevant`, `full` or `count:<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRequest(format!("unknown memory mode {s:?}"));
        match s.trim() {
            "relevant" | "relevant_only" => Ok(MemoryMode::RelevantOnly),
            "full" => Ok(MemoryMode::Full),
            other => {
                let n = other.strip_prefix("count:").ok_or_else(bad)?;
                let n: usize = n.trim().parse().map_err(|_| bad())?;
                Ok(MemoryMode::FixedCount(n))
            }
        }
    }
}

impl Serialize for MemoryMode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    #[serde(rename = "struedit")]
    StruEdit,
    IceBaseline,
}

/// When a case with several paraphrases counts as correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnswerRule {
    Any,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessConfig {
    pub memory_mode: MemoryMode,
    pub system: System,
    pub concurrency_limit: usize,
    pub seed: u64,
    /// Whether full-style memories start from every case's pre-edit chain.
    pub full_includes_originals: bool,
    pub answer_rule: AnswerRule,
    /// Retrieval depth for the baseline.
    pub retrieval_k: usize,
    /// Evaluate only the first `n` cases; memories are still built from all.
    pub case_limit: Option<usize>,
    pub pipeline: PipelineConfig,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            memory_mode: MemoryMode::RelevantOnly,
            system: System::StruEdit,
            concurrency_limit: 4,
            seed: 0,
            full_includes_originals: true,
            answer_rule: AnswerRule::Any,
            retrieval_k: DEFAULT_RETRIEVAL_K,
            case_limit: None,
            pipeline: PipelineConfig::default(),
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.concurrency_limit == 0 {
            return Err(Error::InvalidRequest("concurrency_limit must be >= 1".into()));
        }
        if self.memory_mode == MemoryMode::FixedCount(0) {
            return Err(Error::InvalidRequest("fixed_count needs n >= 1".into()));
        }
        if self.retrieval_k == 0 {
            return Err(Error::InvalidRequest("retrieval_k must be >= 1".into()));
        }
        if self.pipeline.max_hops == 0 {
            return Err(Error::InvalidRequest("max_hops must be >= 1".into()));
        }
        self.pipeline.matcher.validate()
    }
}
