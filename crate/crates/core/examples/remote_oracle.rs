//! Ask a real chat-completions endpoint one question through the pipeline.
//!
//!     ORACLE_ENDPOINT=http://localhost:8000/v1/chat/completions \
//!     ORACLE_API_KEY=... cargo run --example remote_oracle -- <model>

use struedit::{
    answer_question, KnowledgeStructure, OracleConfig, PipelineConfig, PromptTemplateSet,
    RecordingOracle, RemoteOracle,
};

fn main() -> struedit::Result<()> {
    env_logger::init();
    let model = std::env::args().nth(1).unwrap_or_else(|| "gpt-3.5-turbo".into());
    let config = match OracleConfig::from_env(None, model) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}; set ORACLE_ENDPOINT to try this example");
            return Ok(());
        }
    };
    let oracle = RecordingOracle::new(RemoteOracle::from_env(config)?);

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wwe_velocity.tsv");
    let structure = KnowledgeStructure::load_tsv(path)?.apply_edits(&[struedit::EditOperation::replace(
        "WWE Velocity",
        "created by",
        Some("Vince McMahon"),
        "Stan Lee",
    )?]);
    let out = answer_question(
        "Who is married to the creator of WWE Velocity?",
        &structure,
        &oracle,
        &PromptTemplateSet::default(),
        &PipelineConfig::default(),
    );
    println!("{}", serde_json::to_string_pretty(&out).expect("answer serializes"));
    for entry in oracle.transcript() {
        println!("--- {:.2}s\n{}", entry.response.latency.as_secs_f64(), entry.response.text);
    }
    Ok(())
}
