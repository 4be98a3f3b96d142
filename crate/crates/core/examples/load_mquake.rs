//! Load an MQuAKE-format file and look at the memories built from it.
//!
//!     cargo run --example load_mquake [path/to/MQuAKE-CF-3k.json]

use struedit::harness::{build_edit_memory, hop_histogram, load_mquake, HarnessConfig, MemoryMode};

fn main() -> struedit::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mquake_sample.json").into());
    let data = load_mquake(&path)?;
    println!("{} cases, {} skipped", data.cases.len(), data.skipped.len());
    println!("hops: {:?}", hop_histogram(&data.cases));

    let Some(first) = data.cases.first() else {
        return Ok(());
    };
    println!("\ncase {}: {}", first.case_id, first.questions[0]);
    println!("gold: {} (aliases {:?})", first.gold_new_answer, first.answer_aliases);
    for rw in &first.rewrites {
        println!("rewrite: {} / {}: {:?} -> {}", rw.subject, rw.relation, rw.old_object, rw.new_object);
    }

    for mode in [MemoryMode::RelevantOnly, MemoryMode::FixedCount(3), MemoryMode::Full] {
        let config = HarnessConfig {
            memory_mode: mode,
            ..HarnessConfig::default()
        };
        let (structure, memory) = build_edit_memory(&data.cases, 0, &config);
        println!(
            "{mode}: {} triples over {} entities, {} edited statements",
            structure.len(),
            structure.entities().len(),
            memory.len()
        );
    }
    Ok(())
}
