//! `repairshop`: generate instances, solve them, benchmark solvers and run
//! rolling-horizon fleet simulations.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error or invalid input,
//! 3 solve stopped at its time budget.

mod bench;
mod config;
mod error;
mod gen;
mod output;
mod sim;
mod solve;
mod solver;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;
use crate::error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "repairshop", version, about = "Aircraft repair-shop scheduling toolkit")]
struct Cli {
    /// Flat TOML file of option values; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for bench and sim grids; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate static instances or dynamic scenarios.
    Gen(gen::GenArgs),
    /// Solve one static instance.
    Solve(solve::SolveArgs),
    /// Run several solvers over a set of instances.
    Bench(bench::BenchArgs),
    /// Simulate scheduling policies over dynamic scenarios.
    Sim(sim::SimArgs),
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let mut r = config::Resolver::new(&file, "");
    let jobs = r.pick("jobs", cli.jobs, 0usize)?;
    repairshop::par::set_threads(jobs);
    match cli.command {
        Command::Gen(a) => gen::run(a, &file).map(|_| exit::OK),
        Command::Solve(a) => solve::run(a, &file),
        Command::Bench(a) => bench::run(a, &file).map(|_| exit::OK),
        Command::Sim(a) => sim::run(a, &file).map(|_| exit::OK),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
