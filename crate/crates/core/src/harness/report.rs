use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::config::HarnessConfig;
use crate::error::Result;
use crate::pipeline::{FailureReason, StageTrace};

pub const REPORT_VERSION: &str = "report/1";
pub const OUTCOME_CORRECT: &str = "correct";
pub const OUTCOME_WRONG: &str = "wrong_answer";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionRecord {
    pub question: String,
    pub answer: Option<String>,
    pub correct: bool,
    pub failure: Option<FailureReason>,
    pub detail: Option<String>,
    pub duration_s: f64,
    pub oracle_calls: usize,
    pub trace: Vec<StageTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub hop_count: usize,
    pub correct: bool,
    /// `correct`, `wrong_answer`, or a failure reason.
    pub outcome: String,
    /// Sum of stage durations over all paraphrases.
    pub latency_s: f64,
    pub oracle_calls: usize,
    pub questions: Vec<QuestionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencyStats {
    pub mean_s: f64,
    pub median_s: f64,
    pub p95_s: f64,
}

impl LatencyStats {
    /// Nearest-rank p95; median averages the middle pair.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                mean_s: 0.0,
                median_s: 0.0,
                p95_s: 0.0,
            };
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median_s = if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        };
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        Self {
            mean_s: v.iter().sum::<f64>() / n as f64,
            median_s,
            p95_s: v[rank - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencySummary {
    /// Over per-case latencies.
    #[serde(flatten)]
    pub overall: LatencyStats,
    /// Total latency divided by total questions asked.
    pub mean_per_question_s: f64,
    pub per_hop: BTreeMap<usize, LatencyStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub version: String,
    pub config: HarnessConfig,
    pub case_count: usize,
    pub question_count: usize,
    pub overall_accuracy: f64,
    pub per_hop_accuracy: BTreeMap<usize, f64>,
    /// Outcome → number of cases; sums to `case_count`.
    pub error_counts: BTreeMap<String, usize>,
    pub latency: LatencySummary,
    pub oracle_calls_per_question: f64,
    pub cases: Vec<CaseRecord>,
}

impl EvaluationReport {
    pub fn from_records(config: HarnessConfig, cases: Vec<CaseRecord>) -> Self {
        let case_count = cases.len();
        let question_count: usize = cases.iter().map(|c| c.questions.len()).sum();
        let correct = cases.iter().filter(|c| c.correct).count();

        let mut by_hop: BTreeMap<usize, (usize, usize, Vec<f64>)> = BTreeMap::new();
        let mut error_counts = BTreeMap::new();
        for c in &cases {
            let e = by_hop.entry(c.hop_count).or_default();
            e.0 += usize::from(c.correct);
            e.1 += 1;
            e.2.push(c.latency_s);
            *error_counts.entry(c.outcome.clone()).or_insert(0) += 1;
        }
        let latencies: Vec<f64> = cases.iter().map(|c| c.latency_s).collect();
        let total_latency: f64 = latencies.iter().sum();
        let total_calls: usize = cases.iter().map(|c| c.oracle_calls).sum();
        let ratio = |a: f64, b: usize| if b == 0 { 0.0 } else { a / b as f64 };

        Self {
            version: REPORT_VERSION.into(),
            config,
            case_count,
            question_count,
            overall_accuracy: ratio(correct as f64, case_count),
            per_hop_accuracy: by_hop
                .iter()
                .map(|(&h, (ok, n, _))| (h, ratio(*ok as f64, *n)))
                .collect(),
            error_counts,
            latency: LatencySummary {
                overall: LatencyStats::of(&latencies),
                mean_per_question_s: ratio(total_latency, question_count),
                per_hop: by_hop
                    .iter()
                    .map(|(&h, (_, _, l))| (h, LatencyStats::of(l)))
                    .collect(),
            },
            oracle_calls_per_question: ratio(total_calls as f64, question_count),
            cases,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}
