use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use corsing_core::analysis::{rip_exact, rip_monte_carlo};
use corsing_core::numkit::RandomStream;
use rayon::prelude::*;
use serde::Serialize;

use super::{parse_list, system_ensemble, SystemKind};
use crate::report::{write_csv, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "fourier")]
    system: SystemKind,
    #[arg(long = "N")]
    n: usize,
    /// Comma-separated sample counts.
    #[arg(long, value_parser = parse_list)]
    m: std::vec::Vec<usize>,
    /// Comma-separated sparsities.
    #[arg(long, value_parser = parse_list)]
    s: std::vec::Vec<usize>,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, value_enum, default_value = "exact")]
    method: Method,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// Write 0 in the wall_ms column so the file is reproducible.
    #[arg(long)]
    no_timing: bool,
    /// CSV output (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    seed: u64,
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    s: usize,
    method: Method,
    epsilon_s: f64,
    wall_ms: f64,
}

pub fn run(args: SweepArgs) -> Result<(), Failure> {
    let mut grid = Vec::new();
    for seed in args.seed..args.seed + args.seeds {
        for &m in &args.m {
            for &s in &args.s {
                grid.push((seed, m, s));
            }
        }
    }
    let rows = grid
        .par_iter()
        .map(|&(seed, m, s)| {
            let start = Instant::now();
            let a = system_ensemble(args.system, args.n, m, seed)?.matrix;
            let eps = match args.method {
                Method::Exact => rip_exact(&a, s)?.epsilon_s,
                Method::MonteCarlo => rip_monte_carlo(&a, s, args.trials, &RandomStream::new(seed, 1))?.epsilon_s,
            };
            let wall_ms = if args.no_timing { 0.0 } else { start.elapsed().as_secs_f64() * 1e3 };
            Ok(Row { seed, m, n: args.n, s, method: args.method, epsilon_s: eps, wall_ms })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    write_csv(args.out.as_deref(), &rows)
}
