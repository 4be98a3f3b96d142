//! The in-context editing baseline: retrieve statements, ask once.
//!
//!     cargo run --example ice_baseline

use struedit::baseline::{baseline_prompt, DEFAULT_RETRIEVAL_K};
use struedit::{baseline_answer, retrieve_edits, EditMemory, FactTriple, RecordingOracle, ScriptedOracle};

fn main() -> struedit::Result<()> {
    let memory = EditMemory::from_facts([
        FactTriple::new("WWE Velocity", "created by", "Stan Lee")?,
        FactTriple::new("Ellie Kemper", "country of citizenship", "Croatia")?,
        FactTriple::new("Inception", "director", "Hayao Miyazaki")?,
        FactTriple::new("Volkswagen", "headquarters location", "Lyon")?,
        FactTriple::new("The Godfather", "author", "Stephen King")?,
    ]);
    let question = "Who is married to the creator of WWE Velocity?";

    for k in 1..=3 {
        println!("k={k}: {:?}", retrieve_edits(question, &memory, k));
    }
    println!("\n{}\n", baseline_prompt(question, &memory, DEFAULT_RETRIEVAL_K));

    let oracle = RecordingOracle::new(
        ScriptedOracle::new()
            .when_contains("WWE Velocity created by Stan Lee.", " Joan Lee\n")
            .with_fallback("Linda McMahon"),
    );
    let answer = baseline_answer(question, &memory, &oracle, DEFAULT_RETRIEVAL_K)?;
    println!("answer: {answer} ({} call)", oracle.call_count());
    Ok(())
}
