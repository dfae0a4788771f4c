//! `clonal-recur`: batch front-end for simulation, analytic limits and estimation.
//!
//! Exit status: 0 on success, 1 for configuration or I/O problems, 2 when a numerical
//! or simulation step fails.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use commands::{Output, Produced};
use config::ExperimentConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "clonal-recur", version, about = "Clonal diversity at cancer recurrence: simulate, analyze, estimate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble and write run- and clone-level CSVs.
    Simulate(Common),
    /// Evaluate every analytic limit over a grid of margins y.
    Analyze(Common),
    /// Estimate (mu n^-alpha, lambda0, lambda1) from an observation CSV.
    Estimate(Common),
    /// Repeated estimation on simulated cohorts.
    Table1(Common),
    /// Clone counts at recurrence with and without early-recurrence conditioning.
    Fig1(Common),
    /// Conditional Simpson's Index limit over a grid of margins.
    Fig2(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    subcommand: &'static str,
    config: &'a ExperimentConfig,
    threads: Option<usize>,
    runtime_seconds: f64,
    outputs: Vec<String>,
    summary: serde_json::Value,
}

type Runner = fn(&ExperimentConfig, Output) -> Result<Produced, CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let (name, runner, common): (&'static str, Runner, Common) = match cli.command {
        Command::Simulate(c) => ("simulate", commands::simulate, c),
        Command::Analyze(c) => ("analyze", commands::analyze_cmd, c),
        Command::Estimate(c) => ("estimate", commands::estimate_cmd, c),
        Command::Table1(c) => ("table1", commands::table1, c),
        Command::Fig1(c) => ("fig1", commands::fig1, c),
        Command::Fig2(c) => ("fig2", commands::fig2, c),
    };
    let mut config = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.master_seed = Some(seed);
    }
    if let Some(threads) = common.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let out = Output::new(&common.out)?;
    let out_dir = out.dir().to_path_buf();
    let result = runner(&config, out);
    let (produced, failure) = match result {
        Ok(p) => (p, None),
        Err(e) => (Produced { summary: serde_json::Value::Null, outputs: Vec::new() }, Some(e)),
    };
    if failure.as_ref().is_some_and(|e| matches!(e, CliError::Config(_))) {
        return Err(failure.expect("checked"));
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        subcommand: name,
        config: &config,
        threads: common.threads,
        runtime_seconds: started.elapsed().as_secs_f64(),
        outputs: produced.outputs,
        summary: produced.summary,
    };
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("plain data") + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("clonal-recur: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
