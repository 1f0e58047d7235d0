//! `hidbf` command-line driver.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "hidbf", version, about = "H-IDBF-LU preconditioned EFIE solver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `run.output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides `run.threads` (0: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Synthetic-RHS solves for every N target.
    Solve(Common),
    /// Checks the compressed operator against dense oracles.
    Verify(Common),
    /// Timing and memory sweep with a scaling fit.
    Bench(Common),
    /// Iteration counts with and without the preconditioner.
    Iters(Common),
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let common = match &cli.command {
        Command::Solve(c) | Command::Verify(c) | Command::Bench(c) | Command::Iters(c) => c,
    };
    let cfg = ExperimentConfig::load(&common.config).map_err(CliError::Usage)?;
    let threads = common.threads.unwrap_or(cfg.run.threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let out = common.out.as_deref();
    pool.install(|| match &cli.command {
        Command::Solve(_) => commands::cmd_solve(&cfg, out),
        Command::Verify(_) => commands::cmd_verify(&cfg),
        Command::Bench(_) => commands::cmd_bench(&cfg, out),
        Command::Iters(_) => commands::cmd_iters(&cfg, out),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: hidbf <solve|verify|bench|iters> --config <path> [--out <dir>] [--threads k]");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
