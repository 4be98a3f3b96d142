//! End-to-end answer with a scripted oracle that only knows outdated facts.
//!
//!     cargo run --example pipeline_scripted

use struedit::chain::{chain_prompt_key, extraction_prompt_key};
use struedit::{
    answer_question, parse_chain_text, EditOperation, KnowledgeStructure, PipelineConfig,
    PromptTemplateSet, RecordingOracle, ScriptedOracle,
};

const QUESTION: &str = "Who is married to the creator of WWE Velocity?";
const PARAMETRIC: &str =
    "(WWE Velocity ; created by ; Vince McMahon)\n(Vince McMahon ; spouse ; Linda McMahon)";

fn main() -> struedit::Result<()> {
    let steps = parse_chain_text(PARAMETRIC)?;
    let oracle = RecordingOracle::new(
        ScriptedOracle::new()
            .when_ends_with(chain_prompt_key(QUESTION), PARAMETRIC)
            .when_ends_with(
                extraction_prompt_key(&steps),
                "entity: WWE Velocity\nrelations: created by -> spouse",
            ),
    );

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wwe_velocity.tsv");
    let before = KnowledgeStructure::load_tsv(path)?;
    let after = before.apply_edits(&[EditOperation::replace(
        "WWE Velocity",
        "created by",
        Some("Vince McMahon"),
        "Stan Lee",
    )?]);

    let templates = PromptTemplateSet::default();
    let config = PipelineConfig::default();
    for (name, ks) in [("before edit", &before), ("after edit", &after)] {
        let out = answer_question(QUESTION, ks, &oracle, &templates, &config);
        println!("{name}: {:?} via {:?}", out.answer.map(|a| a.to_string()), out.status);
        for stage in &out.trace {
            println!("  {:<20} {:>2} call(s)  {:.6}s", stage.stage, stage.oracle_calls, stage.duration_s);
        }
        if let Some(path) = &out.path {
            for hop in path.hops() {
                println!("  {hop}");
            }
        }
    }
    println!("{} oracle calls in total", oracle.call_count());
    Ok(())
}
