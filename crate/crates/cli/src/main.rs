//! `g4s` command-line driver. Reports go to stdout as one JSON object per
//! line; human-readable messages go to stderr.
//!
//! Exit codes: 0 success, 1 invalid input, 2 internal error, 3 a requested
//! verification failed.

mod commands;
mod error;
mod io;
mod run;

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use error::{CliError, CliResult};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A command's JSON report, plus the reason it failed verification.
pub struct Report {
    pub value: Value,
    pub failure: Option<String>,
}

impl Report {
    pub fn ok(value: Value) -> Self {
        Report { value, failure: None }
    }
}

#[derive(Debug, Parser)]
#[command(name = "g4s", version, about = "Matrix computation on a gather/apply graph engine")]
struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads; falls back to G4S_THREADS, then all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a matrix file to a `.g4s` graph, or a graph back to Matrix Market.
    Transform(commands::TransformArgs),
    /// Run one operation and report strategy, metrics and timing.
    Run(run::RunArgs),
    /// Time candidate strategies over a grid of generated matrices.
    Bench(commands::BenchArgs),
    /// Fit a strategy decision tree to benchmark samples.
    Train(commands::TrainArgs),
    /// Run property suites against the dense oracles.
    Verify(commands::VerifyArgs),
    /// Run a scientific kernel.
    Routine(commands::RoutineArgs),
    /// Write generated matrices or vectors.
    Gen(commands::GenArgs),
}

fn worker_count(flag: Option<usize>) -> CliResult<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("G4S_THREADS") {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse().map_err(|_| CliError::invalid(format!("G4S_THREADS must be a thread count, got `{v}`")))
        }
        _ => Ok(0),
    }
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let workers = worker_count(cli.workers)?;
    let seed = cli.seed;
    g4s::engine::with_workers(workers, || match &cli.command {
        Command::Transform(a) => commands::cmd_transform(a),
        Command::Run(a) => run::cmd_run(a, seed, workers),
        Command::Bench(a) => commands::cmd_bench(a, seed, workers),
        Command::Train(a) => commands::cmd_train(a, seed),
        Command::Verify(a) => commands::cmd_verify(a, seed),
        Command::Routine(a) => commands::cmd_routine(a, seed, workers),
        Command::Gen(a) => commands::cmd_gen(a, seed),
    })?
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            // a closed stdout (for example `| head`) is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{}", report.value);
            match report.failure {
                None => ExitCode::SUCCESS,
                Some(reason) => {
                    let e = CliError::Verification(reason);
                    eprintln!("g4s: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("g4s: {e}");
            e.exit_code()
        }
    }
}
