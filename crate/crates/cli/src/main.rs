//! `corsing-lab`: batch front end for RIP analysis, sparse recovery,
//! CORSING solves, Maurey coverings and multi-seed sweeps.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod report;

use report::Failure;

#[derive(Parser)]
#[command(name = "corsing-lab", version, about)]
struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = "CORSING_LAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the theorem constants as JSON.
    Constants(commands::constants::ConstantsArgs),
    /// Restricted isometry constant of one matrix.
    Rip(commands::rip::RipArgs),
    /// RIP constants over a (seed, m, s) grid, as CSV.
    Sweep(commands::sweep::SweepArgs),
    /// Sparse recovery: one system from files, or a seeded replica sweep.
    Recover(commands::recover::RecoverArgs),
    /// Compressed Petrov-Galerkin solve of a 1D ADR problem.
    Corsing(commands::corsing::CorsingArgs),
    /// Build or verify a Maurey weak cover.
    Cover(commands::cover::CoverArgs),
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Constants(a) => commands::constants::run(a),
        Command::Rip(a) => commands::rip::run(a),
        Command::Sweep(a) => commands::sweep::run(a),
        Command::Recover(a) => commands::recover::run(a),
        Command::Corsing(a) => commands::corsing::run(a),
        Command::Cover(a) => commands::cover::run(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
