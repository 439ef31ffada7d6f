use std::fs::OpenOptions;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use taskbot_core::analytics::analyze_logs;
use taskbot_core::qa::{evaluate, load_eval_records, ALLOWED_K};
use taskbot_core::repl::{run_repl, REPL_SESSION};
use taskbot_core::store::{FileStore, MemoryStore, StateStore};
use taskbot_core::{Config, Engine, Pipeline};

/// Cooking and DIY task assistant.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory whose files replace the bundled corpora and lexicons.
    #[arg(long)]
    corpus_dir: Option<PathBuf>,
    /// Serve the HTTP chat API.
    #[arg(long, conflicts_with_all = ["repl", "analyze", "qa_eval"])]
    serve: bool,
    /// Chat on stdin and stdout.
    #[arg(long, conflicts_with_all = ["analyze", "qa_eval"])]
    repl: bool,
    /// Summarize a turn log.
    #[arg(long, value_name = "LOG")]
    analyze: Option<PathBuf>,
    /// `session_id,rating` CSV joined into the log analysis.
    #[arg(long, value_name = "CSV", requires = "analyze")]
    ratings: Option<PathBuf>,
    /// Score the extractive answerer on a JSONL set for k = 0, 1 and 5.
    #[arg(long, value_name = "JSONL")]
    qa_eval: Option<PathBuf>,
    #[arg(long, default_value_t = 8080)]
    port: u16,
}

fn load_config(cli: &Cli) -> anyhow::Result<Config> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(dir) = &cli.corpus_dir {
        config.corpus_dir = Some(dir.clone());
    }
    Ok(config)
}

fn build_engine(config: Config) -> anyhow::Result<Engine> {
    let store: Box<dyn StateStore> = match &config.state_dir {
        Some(dir) => Box::new(FileStore::open(dir.clone())?),
        None => Box::new(MemoryStore::new()),
    };
    let log_path = config.log_path.clone();
    let mut engine = Engine::new(Pipeline::new(config).context("could not load resources")?, store);
    if let Some(path) = log_path {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .with_context(|| format!("could not open log {}", path.display()))?;
        engine = engine.with_log(file);
    }
    Ok(engine)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    if let Some(log) = &cli.analyze {
        let report = analyze_logs(log, cli.ratings.as_deref())?;
        print!("{}", report.render());
        return Ok(0);
    }
    let config = load_config(&cli)?;
    if let Some(path) = &cli.qa_eval {
        let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
        let records = load_eval_records(&text)?;
        let pipeline = Pipeline::new(config.clone())?;
        let providers = config.providers.build();
        let report = evaluate(pipeline.knowledge(), &records, &ALLOWED_K, config.qa.overlap_threshold, &providers.extractive)?;
        print!("{}", report.render());
        return Ok(0);
    }
    let engine = build_engine(config)?;
    if cli.serve {
        let runtime = tokio::runtime::Runtime::new()?;
        runtime.block_on(async {
            let listener = tokio::net::TcpListener::bind(("0.0.0.0", cli.port)).await?;
            log::info!("listening on {}", listener.local_addr()?);
            axum::serve(listener, taskbot::app(Arc::new(engine))).await?;
            anyhow::Ok(())
        })?;
        return Ok(0);
    }
    let stdin = io::stdin();
    Ok(run_repl(&engine, REPL_SESSION, stdin.lock(), io::stdout().lock())?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
