use std::path::PathBuf;

use clap::{Args, ValueEnum};
use corsing_core::numkit::{read_matrix_csv, ComplexMatrix, RandomStream};
use corsing_core::recovery::{basis_pursuit, omp, weighted_basis_pursuit, RecoveryOutcome, WeightVector};
use corsing_core::C64;
use rayon::prelude::*;
use serde::Serialize;

use super::rip::read_weights;
use super::{parse_list, system_ensemble, SystemKind};
use crate::report::{report, write_csv, write_json, Failure};

const BP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Omp,
    Bp,
    Wbp,
}

/// How `zeta` constrains basis pursuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `||A z - y||_2 <= zeta`.
    Raw,
    /// `||sqrt(C m) A z - y||_2 <= zeta`, for `A` carrying `1/sqrt(C m)`.
    Rescaled,
}

#[derive(Args, Serialize)]
pub struct RecoverArgs {
    #[arg(long, value_enum, default_value = "omp")]
    algo: Algo,
    /// Matrix CSV for a single recovery.
    #[arg(long, requires = "y", conflicts_with = "system")]
    matrix: Option<PathBuf>,
    /// Measurement vector CSV (an m x 1 matrix file).
    #[arg(long)]
    y: Option<PathBuf>,
    /// Built-in system for a seeded replica sweep.
    #[arg(long, value_enum)]
    system: Option<SystemKind>,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Comma-separated sample counts (sweep).
    #[arg(long, value_parser = parse_list)]
    m: Option<std::vec::Vec<usize>>,
    /// Comma-separated sparsities (sweep).
    #[arg(long, value_parser = parse_list)]
    s: Option<std::vec::Vec<usize>>,
    #[arg(long, default_value_t = 1)]
    replicas: u64,
    /// First seed of the sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// OMP iterations (sweep default: s).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    zeta: f64,
    #[arg(long, value_enum, default_value = "raw")]
    constraint: Constraint,
    /// Upper Riesz constant `C` for the rescaled constraint.
    #[arg(long, default_value_t = 1.0)]
    c_psi: f64,
    /// Weight file for `wbp` (default all ones).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Output: JSON for a single recovery, CSV for a sweep (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SingleResult {
    outcome: corsing_core::recovery::OutcomeRecord,
    degenerate: bool,
    selection_path: Vec<usize>,
    duality_gap: Option<f64>,
}

#[derive(Serialize)]
struct Row {
    seed: u64,
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    s: usize,
    algo: Algo,
    support_recovered: bool,
    relative_error: f64,
    residual_l2: f64,
    iterations: usize,
}

fn solve(
    args: &RecoverArgs,
    a: &ComplexMatrix<f64>,
    y: &[C64],
    k: usize,
    weights: Option<&WeightVector<f64>>,
) -> Result<RecoveryOutcome<f64>, Failure> {
    let (yy, zeta): (Vec<C64>, f64) = match args.constraint {
        Constraint::Raw => (y.to_vec(), args.zeta),
        Constraint::Rescaled => {
            if !(args.c_psi > 0.0) {
                return Err(Failure::config("--c-psi must be positive"));
            }
            let f = 1.0 / (args.c_psi * a.rows() as f64).sqrt();
            (y.iter().map(|v| v * f).collect(), args.zeta * f)
        }
    };
    Ok(match args.algo {
        Algo::Omp => omp(a, y, k)?,
        Algo::Bp => basis_pursuit(a, &yy, zeta, BP_TOL)?,
        Algo::Wbp => {
            let ones;
            let w = match weights {
                Some(w) => w,
                None => {
                    ones = WeightVector::ones(a.cols());
                    &ones
                }
            };
            weighted_basis_pursuit(a, &yy, w, zeta, BP_TOL)?
        }
    })
}

pub fn run(args: RecoverArgs) -> Result<(), Failure> {
    let weights = args.weights.as_deref().map(read_weights).transpose()?;
    if let (Some(mpath), Some(ypath)) = (&args.matrix, &args.y) {
        let a = read_matrix_csv::<f64>(mpath)?;
        let ym = read_matrix_csv::<f64>(ypath)?;
        if ym.cols() != 1 && ym.rows() != 1 {
            return Err(Failure::config("y must be a single row or column"));
        }
        let y = ym.into_vec();
        let k = args.k.unwrap_or_else(|| a.rows().min(a.cols()));
        let out = solve(&args, &a, &y, k, weights.as_ref())?;
        let result = SingleResult {
            outcome: out.record(),
            degenerate: out.degenerate,
            selection_path: out.selection_path.clone(),
            duality_gap: out.duality_gap,
        };
        return write_json(args.out.as_deref(), &report("recover", &args, result));
    }
    let (Some(system), Some(n), Some(ms), Some(ss)) = (args.system, args.n, &args.m, &args.s) else {
        return Err(Failure::config("give --matrix and --y, or --system, --N, --m and --s"));
    };
    let mut grid = Vec::new();
    for seed in args.seed..args.seed + args.replicas {
        for &m in ms {
            for &s in ss {
                grid.push((seed, m, s));
            }
        }
    }
    let rows = grid
        .par_iter()
        .map(|&(seed, m, s)| {
            if s > n {
                return Err(Failure::config(format!("s = {s} exceeds N = {n}")));
            }
            let a = system_ensemble(system, n, m, seed)?.matrix;
            let mut rng = RandomStream::new(seed, 1);
            let mut support = rng.subset(n, s);
            support.sort_unstable();
            let mut f = vec![C64::new(0.0, 0.0); n];
            for &j in &support {
                f[j] = rng.complex_normal();
            }
            let y = a.matvec(&f)?;
            let k = args.k.unwrap_or(s).min(m).min(n);
            let out = solve(&args, &a, &y, k, weights.as_ref())?;
            let err: f64 = out.estimate.iter().zip(&f).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
            let nrm: f64 = f.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let mut found: Vec<usize> = out
                .estimate
                .iter()
                .enumerate()
                .filter(|(_, v)| v.norm() > 1e-6 * nrm)
                .map(|(j, _)| j)
                .collect();
            found.sort_unstable();
            Ok(Row {
                seed,
                m,
                n,
                s,
                algo: args.algo,
                support_recovered: found == support,
                relative_error: err / nrm,
                residual_l2: out.residual_l2,
                iterations: out.iterations,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    write_csv(args.out.as_deref(), &rows)
}
