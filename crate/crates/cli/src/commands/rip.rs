use std::path::PathBuf;

use clap::Args;
use corsing_core::analysis::{rip_exact, rip_monte_carlo, weighted_rip_exact};
use corsing_core::numkit::{read_matrix_csv, RandomStream};
use corsing_core::recovery::WeightVector;
use serde::Serialize;

use super::{system_ensemble, SystemKind};
use crate::report::{read_text, report, write_json, Failure};

#[derive(Args, Serialize)]
pub struct RipArgs {
    /// Built-in system to sample the matrix from.
    #[arg(long, value_enum, conflicts_with = "matrix", requires_all = ["n", "m"])]
    system: Option<SystemKind>,
    /// Matrix CSV (`rows,cols` line, then `re,im` per entry).
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Sparsity.
    #[arg(long, required_unless_present = "budget")]
    s: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exhaustive enumeration (the default).
    #[arg(long, conflicts_with = "monte_carlo")]
    exact: bool,
    /// Random s-sparse unit vectors instead of enumeration.
    #[arg(long)]
    monte_carlo: bool,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// Weight file (one value per line) for the weighted constant.
    #[arg(long, requires = "budget")]
    weights: Option<PathBuf>,
    /// Weighted sparsity budget.
    #[arg(long, requires = "weights")]
    budget: Option<f64>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn read_weights(path: &std::path::Path) -> Result<WeightVector<f64>, Failure> {
    let text = read_text(path)?;
    let mut w = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        w.push(
            t.parse::<f64>()
                .map_err(|e| Failure::config(format!("{} line {}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(WeightVector::new(w)?)
}

pub fn run(args: RipArgs) -> Result<(), Failure> {
    let a = match (&args.system, &args.matrix) {
        (Some(kind), None) => system_ensemble(*kind, args.n.unwrap_or(0), args.m.unwrap_or(0), args.seed)?.matrix,
        (None, Some(path)) => read_matrix_csv::<f64>(path)?,
        _ => return Err(Failure::config("give exactly one of --system or --matrix")),
    };
    let result = if let (Some(wpath), Some(budget)) = (&args.weights, args.budget) {
        weighted_rip_exact(&a, budget, &read_weights(wpath)?)?
    } else {
        let s = args.s.ok_or_else(|| Failure::config("--s is required"))?;
        if args.monte_carlo {
            rip_monte_carlo(&a, s, args.trials, &RandomStream::new(args.seed, 1))?
        } else {
            rip_exact(&a, s)?
        }
    };
    write_json(args.out.as_deref(), &report("rip", &args, result))
}
