//! Evaluate both systems on a generated suite under different memories.
//!
//!     cargo run --release --example evaluate_synthetic

use struedit::harness::{run_evaluation, HarnessConfig, MemoryMode, System};
use struedit::pipeline::{PipelineConfig, Timing};
use struedit::synthetic::{faithful_script, synthetic_suite};
use struedit::PromptTemplateSet;

fn main() -> struedit::Result<()> {
    let cases = synthetic_suite(7, &[(2, 20), (3, 20), (4, 20)]);
    let oracle = faithful_script(&cases);
    let templates = PromptTemplateSet::default();

    println!("{:<10} {:<10} {:>8} {:>12}", "system", "memory", "accuracy", "calls/q");
    for system in [System::StruEdit, System::IceBaseline] {
        for memory in [MemoryMode::RelevantOnly, MemoryMode::FixedCount(10), MemoryMode::Full] {
            let config = HarnessConfig {
                system,
                memory_mode: memory,
                seed: 7,
                pipeline: PipelineConfig {
                    timing: Timing::OracleReported,
                    ..PipelineConfig::default()
                },
                ..HarnessConfig::default()
            };
            let report = run_evaluation(&cases, &config, &oracle, &templates)?;
            println!(
                "{:<10} {:<10} {:>8.3} {:>12.2}",
                format!("{system:?}"),
                memory.to_string(),
                report.overall_accuracy,
                report.oracle_calls_per_question
            );
            for (hops, acc) in &report.per_hop_accuracy {
                println!("{:>23}-hop {acc:.3}", hops);
            }
        }
    }
    Ok(())
}
