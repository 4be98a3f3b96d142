use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use struedit::harness::{
    build_edit_memory, evaluate_case, hop_histogram, load_mquake, run_evaluation, AnswerRule,
    HarnessConfig, MemoryMode, MultiHopCase, System,
};
use struedit::pipeline::{FanoutPolicy, PipelineConfig, Timing};
use struedit::{
    Error, ExtractionMode, MatchStrategy, MatcherConfig, Oracle, OracleConfig, PromptTemplateSet,
    RecordingOracle, RemoteOracle, ScriptedOracle,
};

#[derive(Parser)]
#[command(name = "edit-eval", version, about = "Evaluate structural knowledge editing on MQuAKE-format data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a dataset and write a report.
    Run {
        #[command(flatten)]
        setup: Setup,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate only the first N cases (memories still use all).
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Summarize a dataset: case counts, skips, hop histogram.
    Inspect {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Run one case and dump its records and the full oracle transcript.
    Trace {
        #[command(flatten)]
        setup: Setup,
        #[arg(long = "case")]
        case_id: String,
    },
}

#[derive(Args)]
struct Setup {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "struedit")]
    system: SystemArg,
    /// relevant | full | count:<n>
    #[arg(long, default_value = "relevant")]
    memory: MemoryMode,
    /// scripted:<script.json> | remote
    #[arg(long)]
    oracle: String,
    /// Chat-completions URL; falls back to ORACLE_ENDPOINT.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_enum, default_value = "llm")]
    extraction: ExtractionArg,
    #[arg(long, value_enum, default_value = "oracle")]
    matcher: MatcherArg,
    /// Entity candidates kept after lexical pre-filtering.
    #[arg(long, default_value_t = 20)]
    top_k: usize,
    #[arg(long, value_enum, default_value = "strict")]
    fanout: FanoutArg,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    full_includes_originals: bool,
    #[arg(long, value_enum, default_value = "any")]
    answer_rule: RuleArg,
    /// Statements retrieved by the baseline.
    #[arg(long, default_value_t = 4)]
    retrieval_k: usize,
    #[arg(long, default_value_t = 6)]
    max_hops: usize,
    /// auto = oracle-reported for scripted oracles, wall clock otherwise.
    #[arg(long, value_enum, default_value = "auto")]
    timing: TimingArg,
    /// Directory with chain_generation.txt and extraction.txt.
    #[arg(long)]
    prompts: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Struedit,
    Ice,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtractionArg {
    Llm,
    Det,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatcherArg {
    Oracle,
    Lexical,
}

#[derive(Clone, Copy, ValueEnum)]
enum FanoutArg {
    Strict,
    Lenient,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Any,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum TimingArg {
    Auto,
    Wall,
    Reported,
}

enum Failure {
    Dataset(String),
    OracleConfig(String),
    Other(String),
}

impl Failure {
    fn exit(self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Dataset(m) => (2, m),
            Failure::OracleConfig(m) => (3, m),
            Failure::Other(m) => (1, m),
        };
        eprintln!("edit-eval: {msg}");
        ExitCode::from(code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DatasetUnreadable { .. } | Error::SchemaMismatch { .. } => {
                Failure::Dataset(e.to_string())
            }
            Error::OracleConfig(_) => Failure::OracleConfig(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { setup, out, limit } => run(&setup, out.as_deref(), limit),
        Command::Inspect { dataset } => inspect(&dataset),
        Command::Trace { setup, case_id } => trace(&setup, &case_id),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}

fn load(path: &Path) -> Result<Vec<MultiHopCase>, Failure> {
    let loaded = load_mquake(path)?;
    if !loaded.skipped.is_empty() {
        log::warn!("{} case(s) skipped while loading", loaded.skipped.len());
    }
    Ok(loaded.cases)
}

fn build_oracle(setup: &Setup) -> Result<(Box<dyn Oracle>, bool), Failure> {
    if let Some(path) = setup.oracle.strip_prefix("scripted:") {
        let script = ScriptedOracle::load(path).map_err(|e| Failure::OracleConfig(e.to_string()))?;
        return Ok((Box::new(script), true));
    }
    if setup.oracle != "remote" {
        return Err(Failure::OracleConfig(format!(
            "--oracle must be scripted:<file> or remote, got {:?}",
            setup.oracle
        )));
    }
    let model = setup
        .model
        .clone()
        .ok_or_else(|| Failure::OracleConfig("--model is required with --oracle remote".into()))?;
    let config = OracleConfig::from_env(setup.endpoint.clone(), model)
        .map_err(|e| Failure::OracleConfig(e.to_string()))?;
    let oracle = RemoteOracle::from_env(config).map_err(|e| Failure::OracleConfig(e.to_string()))?;
    Ok((Box::new(oracle), false))
}

fn harness_config(setup: &Setup, scripted: bool, limit: Option<usize>) -> HarnessConfig {
    let timing = match setup.timing {
        TimingArg::Wall => Timing::WallClock,
        TimingArg::Reported => Timing::OracleReported,
        TimingArg::Auto if scripted => Timing::OracleReported,
        TimingArg::Auto => Timing::WallClock,
    };
    let matcher = MatcherConfig {
        strategy: match setup.matcher {
            MatcherArg::Oracle => MatchStrategy::Oracle,
            MatcherArg::Lexical => MatchStrategy::Lexical,
        },
        prefilter_top_k: setup.top_k,
        ..MatcherConfig::default()
    };
    HarnessConfig {
        memory_mode: setup.memory,
        system: match setup.system {
            SystemArg::Struedit => System::StruEdit,
            SystemArg::Ice => System::IceBaseline,
        },
        concurrency_limit: setup.concurrency,
        seed: setup.seed,
        full_includes_originals: setup.full_includes_originals,
        answer_rule: match setup.answer_rule {
            RuleArg::Any => AnswerRule::Any,
            RuleArg::All => AnswerRule::All,
        },
        retrieval_k: setup.retrieval_k,
        case_limit: limit,
        pipeline: PipelineConfig {
            extraction_mode: match setup.extraction {
                ExtractionArg::Llm => ExtractionMode::Llm,
                ExtractionArg::Det => ExtractionMode::Deterministic,
            },
            matcher,
            fanout_policy: match setup.fanout {
                FanoutArg::Strict => FanoutPolicy::Strict,
                FanoutArg::Lenient => FanoutPolicy::Lenient,
            },
            max_hops: setup.max_hops,
            timing,
        },
    }
}

fn templates(setup: &Setup) -> Result<PromptTemplateSet, Failure> {
    match &setup.prompts {
        Some(dir) => Ok(PromptTemplateSet::load_dir(dir)?),
        None => Ok(PromptTemplateSet::default()),
    }
}

fn run(setup: &Setup, out: Option<&Path>, limit: Option<usize>) -> Result<(), Failure> {
    let cases = load(&setup.dataset)?;
    if cases.is_empty() {
        return Err(Failure::Dataset("dataset has no usable cases".into()));
    }
    let (oracle, scripted) = build_oracle(setup)?;
    let config = harness_config(setup, scripted, limit);
    config.validate().map_err(|e| Failure::Other(e.to_string()))?;
    let report = run_evaluation(&cases, &config, oracle.as_ref(), &templates(setup)?)?;
    eprintln!(
        "{} cases, accuracy {:.4}, {:.2} oracle calls/question",
        report.case_count, report.overall_accuracy, report.oracle_calls_per_question
    );
    match out {
        Some(path) => report.save(path)?,
        None => println!("{}", report.to_json()),
    }
    Ok(())
}

fn inspect(dataset: &Path) -> Result<(), Failure> {
    let loaded = load_mquake(dataset)?;
    let questions: usize = loaded.cases.iter().map(|c| c.questions.len()).sum();
    let rewrites: usize = loaded.cases.iter().map(|c| c.rewrites.len()).sum();
    let summary = json!({
        "dataset": dataset.display().to_string(),
        "cases": loaded.cases.len(),
        "skipped": loaded.skipped.len(),
        "hop_histogram": hop_histogram(&loaded.cases),
        "questions": questions,
        "rewrites": rewrites,
        "skipped_cases": loaded.skipped,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(())
}

fn trace(setup: &Setup, case_id: &str) -> Result<(), Failure> {
    let cases = load(&setup.dataset)?;
    let index = cases
        .iter()
        .position(|c| c.case_id == case_id)
        .ok_or_else(|| Failure::Dataset(format!("no case with id {case_id:?}")))?;
    let (oracle, scripted) = build_oracle(setup)?;
    let config = harness_config(setup, scripted, None);
    config.validate().map_err(|e| Failure::Other(e.to_string()))?;
    let recorder = RecordingOracle::new(oracle);
    let (structure, memory) = build_edit_memory(&cases, index, &config);
    let record = evaluate_case(&cases[index], &structure, &memory, &config, &recorder, &templates(setup)?);
    let dump = json!({
        "case": cases[index],
        "structure_triples": structure.len(),
        "edit_memory": memory.rendered(),
        "record": record,
        "transcript": recorder.take_transcript(),
    });
    println!("{}", serde_json::to_string_pretty(&dump).expect("trace serializes"));
    Ok(())
}
