use std::time::Instant;

use rayon::prelude::*;

use super::config::{AnswerRule, HarnessConfig, MemoryMode, System};
use super::dataset::MultiHopCase;
use super::memory::{build_edit_memory, memory_for};
use super::report::{CaseRecord, EvaluationReport, QuestionRecord, OUTCOME_CORRECT, OUTCOME_WRONG};
use crate::baseline::{baseline_answer, EditMemory};
use crate::chain::PromptTemplateSet;
use crate::error::{Error, Result};
use crate::oracle::{Oracle, OracleRequest, OracleResponse};
use crate::pipeline::{answer_question, FailureReason, StageTrace, Timing};
use crate::store::KnowledgeStructure;
use crate::text::normalize_label;

/// Normalized equality against the gold answer or any alias.
pub fn answer_is_correct(answer: &str, case: &MultiHopCase) -> bool {
    let a = normalize_label(answer);
    !a.is_empty()
        && std::iter::once(&case.gold_new_answer)
            .chain(&case.answer_aliases)
            .any(|g| normalize_label(g) == a)
}

/// Answers every paraphrase of every (limited) case and aggregates.
///
/// Cases run on a pool of `concurrency_limit` threads; records come back in
/// case order, so the report does not depend on scheduling.
pub fn run_evaluation(
    cases: &[MultiHopCase],
    config: &HarnessConfig,
    oracle: &dyn Oracle,
    templates: &PromptTemplateSet,
) -> Result<EvaluationReport> {
    config.validate()?;
    if cases.is_empty() {
        return Err(Error::InvalidRequest("no cases to evaluate".into()));
    }
    let evaluated = config.case_limit.unwrap_or(cases.len()).min(cases.len());
    let shared = (config.memory_mode == MemoryMode::Full)
        .then(|| memory_for(cases, &(0..cases.len()).collect::<Vec<_>>(), config));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.concurrency_limit)
        .build()
        .map_err(|e| Error::InvalidRequest(format!("thread pool: {e}")))?;
    let records: Vec<CaseRecord> = pool.install(|| {
        (0..evaluated)
            .into_par_iter()
            .map(|i| {
                let owned;
                let (structure, memory) = match &shared {
                    Some((s, m)) => (s, m),
                    None => {
                        owned = build_edit_memory(cases, i, config);
                        (&owned.0, &owned.1)
                    }
                };
                evaluate_case(&cases[i], structure, memory, config, oracle, templates)
            })
            .collect()
    });
    Ok(EvaluationReport::from_records(config.clone(), records))
}

/// Runs one case against a prepared memory.
pub fn evaluate_case(
    case: &MultiHopCase,
    structure: &KnowledgeStructure,
    memory: &EditMemory,
    config: &HarnessConfig,
    oracle: &dyn Oracle,
    templates: &PromptTemplateSet,
) -> CaseRecord {
    let questions: Vec<QuestionRecord> = case
        .questions
        .iter()
        .map(|q| match config.system {
            System::StruEdit => {
                let out = answer_question(q, structure, oracle, templates, &config.pipeline);
                let answer = out.answer.as_ref().map(|e| e.display().to_string());
                let (failure, detail) = match &out.status {
                    crate::pipeline::AnswerStatus::Answered => (None, None),
                    crate::pipeline::AnswerStatus::Failed { reason, detail } => {
                        (Some(*reason), Some(detail.clone()))
                    }
                };
                QuestionRecord {
                    question: q.clone(),
                    correct: answer.as_deref().is_some_and(|a| answer_is_correct(a, case)),
                    answer,
                    failure,
                    detail,
                    duration_s: out.total_duration_s(),
                    oracle_calls: out.total_oracle_calls(),
                    trace: out.trace,
                }
            }
            System::IceBaseline => ask_baseline(q, case, memory, config, oracle),
        })
        .collect();

    let first_miss = questions.iter().find(|r| !r.correct);
    let correct = match config.answer_rule {
        AnswerRule::Any => questions.iter().any(|r| r.correct),
        AnswerRule::All => first_miss.is_none(),
    };
    let outcome = if correct {
        OUTCOME_CORRECT.to_string()
    } else {
        match first_miss.and_then(|r| r.failure) {
            Some(reason) => reason.to_string(),
            None => OUTCOME_WRONG.to_string(),
        }
    };
    CaseRecord {
        case_id: case.case_id.clone(),
        hop_count: case.hop_count,
        correct,
        outcome,
        latency_s: questions.iter().map(|r| r.duration_s).sum(),
        oracle_calls: questions.iter().map(|r| r.oracle_calls).sum(),
        questions,
    }
}

/// Reported latency of the single baseline call, captured on the way through.
struct LatencyTap<'a> {
    inner: &'a dyn Oracle,
    reported: std::sync::Mutex<std::time::Duration>,
}

impl Oracle for LatencyTap<'_> {
    fn complete(&self, request: &OracleRequest) -> Result<OracleResponse> {
        let resp = self.inner.complete(request)?;
        *self.reported.lock().unwrap_or_else(|p| p.into_inner()) += resp.latency;
        Ok(resp)
    }
}

fn ask_baseline(
    question: &str,
    case: &MultiHopCase,
    memory: &EditMemory,
    config: &HarnessConfig,
    oracle: &dyn Oracle,
) -> QuestionRecord {
    let tap = LatencyTap {
        inner: oracle,
        reported: Default::default(),
    };
    let started = Instant::now();
    let result = baseline_answer(question, memory, &tap, config.retrieval_k);
    let duration = match config.pipeline.timing {
        Timing::WallClock => started.elapsed(),
        Timing::OracleReported => tap.reported.into_inner().unwrap_or_else(|p| p.into_inner()),
    };
    let trace = vec![StageTrace {
        stage: "baseline",
        duration_s: duration.as_secs_f64(),
        oracle_calls: 1,
    }];
    match result {
        Ok(text) => QuestionRecord {
            question: question.to_string(),
            correct: answer_is_correct(&text, case),
            answer: Some(text),
            failure: None,
            detail: None,
            duration_s: duration.as_secs_f64(),
            oracle_calls: 1,
            trace,
        },
        Err(e) => QuestionRecord {
            question: question.to_string(),
            answer: None,
            correct: false,
            failure: Some(FailureReason::OracleUnavailable),
            detail: Some(e.to_string()),
            duration_s: duration.as_secs_f64(),
            oracle_calls: 1,
            trace,
        },
    }
}
