//! Parse a model-written reasoning chain and reduce it to a skeleton.
//!
//!     cargo run --example chain_extraction

use struedit::chain::extraction_prompt_key;
use struedit::{
    extract_skeleton, parse_chain_text, ExtractionMode, PromptTemplateSet, ReasoningChain,
    ScriptedOracle,
};

const RAW: &str = "Sure! Here is the chain:
1. (WWE Velocity ; created by ; Vince McMahon)
2. (Vince McMahon ; spouse ; Linda McMahon)
So the answer is Linda McMahon.";

fn main() -> struedit::Result<()> {
    let steps = parse_chain_text(RAW)?;
    let chain = ReasoningChain::new(steps.clone(), RAW)?;
    println!("parsed {} steps, linkage breaks: {:?}", chain.steps.len(), chain.linkage_breaks());

    let templates = PromptTemplateSet::default();
    let none = ScriptedOracle::new();
    let det = extract_skeleton(&chain, &none, &templates, ExtractionMode::Deterministic)?;
    println!("deterministic:\n{det}");

    // the oracle restates the skeleton; intermediate entities are gone either way
    let oracle = ScriptedOracle::new().when_ends_with(
        extraction_prompt_key(&steps),
        "entity: WWE Velocity\nrelations: created by -> spouse",
    );
    let llm = extract_skeleton(&chain, &oracle, &templates, ExtractionMode::Llm)?;
    println!("llm:\n{llm}");
    assert_eq!(det, llm);

    println!("\nextraction prompt:\n{}", templates.extraction_request(&chain).user_text);
    Ok(())
}
