use std::path::PathBuf;

use clap::Args;
use corsing_core::corsing::{
    corsing_rip_inputs, h1_error, AdrProblem, CorsingConfig, CorsingPlan, PetrovGalerkinSetup, SolutionRecord,
    KAPPA_LIMIT,
};
use corsing_core::numkit::least_squares;
use corsing_core::systems::{hat_hierarchical_system, sine_h10_system, H10Basis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{median, read_text, report, write_csv, write_json, Failure};

const DEFAULT_TEST_CAP: usize = 1 << 20;
const DEFAULT_TEST_CAP_VARIABLE: usize = 1 << 12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialSpec {
    /// `sine` or `hat`.
    pub kind: String,
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
    #[serde(default)]
    pub levels: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestSpec {
    /// Only `sine` is supported.
    pub kind: String,
    #[serde(default)]
    pub cap: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigSpec {
    pub s: usize,
    /// Defaults to `ceil(4 s ln N)`.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default, rename = "L")]
    pub l_bound: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

fn default_gamma() -> f64 {
    0.5
}

/// Problem definition file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(flatten)]
    pub problem: AdrProblem,
    pub trial: TrialSpec,
    pub test: TestSpec,
    pub config: ConfigSpec,
}

impl ProblemFile {
    pub fn trial(&self) -> Result<H10Basis, Failure> {
        match self.trial.kind.as_str() {
            "sine" => {
                let n = self.trial.n.ok_or_else(|| Failure::config("sine trial needs N"))?;
                Ok(H10Basis::Sine(sine_h10_system(n)?))
            }
            "hat" => {
                let levels = match (self.trial.levels, self.trial.n) {
                    (Some(l), _) => l,
                    (None, Some(n)) if (n + 1).is_power_of_two() => (n + 1).trailing_zeros(),
                    _ => return Err(Failure::config("hat trial needs levels, or N = 2^L - 1")),
                };
                let basis = H10Basis::Hat(hat_hierarchical_system(levels)?);
                if let Some(n) = self.trial.n {
                    if n != basis.len() {
                        return Err(Failure::config(format!("hat trial with {levels} levels has N = {}", basis.len())));
                    }
                }
                Ok(basis)
            }
            other => Err(Failure::config(format!("unknown trial kind {other:?} (sine | hat)"))),
        }
    }

    pub fn config(&self, n: usize) -> CorsingConfig {
        let c = &self.config;
        CorsingConfig {
            s: c.s,
            n,
            gamma: c.gamma,
            m: c.m.unwrap_or_else(|| (4.0 * c.s as f64 * (n as f64).ln()).ceil().max(1.0) as usize),
            seed: c.seed,
            k: c.k,
            l_bound: c.l_bound,
            epsilon: c.epsilon,
        }
    }
}

#[derive(Args, Serialize)]
pub struct CorsingArgs {
    /// Problem definition JSON.
    #[arg(long)]
    problem: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config sparsity.
    #[arg(long)]
    s: Option<usize>,
    /// Override the number of test samples.
    #[arg(long)]
    m: Option<usize>,
    /// Solve for seeds seed, seed+1, ..., reporting medians.
    #[arg(long)]
    replicas: Option<u64>,
    /// Solution report JSON (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-replica CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Samples of u_hat on a uniform grid (CSV x,u_hat).
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, default_value_t = 101)]
    grid_points: usize,
}

#[derive(Serialize)]
struct Row {
    seed: u64,
    s: usize,
    m: usize,
    #[serde(rename = "M")]
    tests: usize,
    #[serde(rename = "N")]
    n: usize,
    kappa: f64,
    h1_error: f64,
    residual: f64,
    support_size: usize,
    truncated: bool,
}

#[derive(Serialize)]
struct GridRow {
    x: f64,
    u_hat: f64,
}

#[derive(Serialize)]
struct Output {
    problem: ProblemFile,
    setup: corsing_core::corsing::SetupRecord,
    reference: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rip: Option<corsing_core::corsing::CorsingRipInputs>,
    solutions: Vec<SolutionRecord>,
    median_h1_error: f64,
    median_residual: f64,
}

pub fn run(args: CorsingArgs) -> Result<(), Failure> {
    let text = read_text(&args.problem)?;
    let mut file: ProblemFile = serde_json::from_str(&text)?;
    if file.test.kind != "sine" {
        return Err(Failure::config(format!("unsupported test kind {:?} (sine)", file.test.kind)));
    }
    if let Some(seed) = args.seed {
        file.config.seed = seed;
    }
    if let Some(s) = args.s {
        file.config.s = s;
    }
    if let Some(m) = args.m {
        file.config.m = Some(m);
    }
    let trial = file.trial()?;
    let n = trial.len();
    let cap = file.test.cap.unwrap_or(if file.problem.has_constant_coefficients() {
        DEFAULT_TEST_CAP
    } else {
        DEFAULT_TEST_CAP_VARIABLE
    });
    let setup = PetrovGalerkinSetup::new(trial.clone(), cap, &file.problem)?;
    let config = file.config(n);
    let plan = CorsingPlan::prepare(&setup, &file.problem, &config)?;
    if plan.kappa >= KAPPA_LIMIT {
        eprintln!(
            "warning: kappa = {} >= 13/12; the recovery guarantee does not cover this problem",
            plan.kappa
        );
    }
    // Reference: least-squares solution of the full truncated system.
    let reference = least_squares(&plan.b, &plan.c)?.solution;
    let rip = config.epsilon.map(|e| corsing_rip_inputs(&plan, e)).transpose()?;

    let seeds: Vec<u64> = (0..args.replicas.unwrap_or(1)).map(|r| config.seed + r).collect();
    let solutions = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = CorsingConfig { seed, ..config.clone() };
            let sol = plan.solve(&cfg)?;
            let err = h1_error(&sol.coefficients(), &reference, &trial)?;
            Ok((seed, sol, err))
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    if let Some(path) = &args.grid {
        let sol = &solutions[0].1;
        let k = args.grid_points.max(2);
        let rows: Vec<GridRow> = (0..k)
            .map(|i| {
                let x = i as f64 / (k - 1) as f64;
                GridRow { x, u_hat: sol.evaluate(x).re }
            })
            .collect();
        write_csv(Some(path), &rows)?;
    }
    let rows: Vec<Row> = solutions
        .iter()
        .map(|(seed, sol, err)| Row {
            seed: *seed,
            s: config.s,
            m: config.m,
            tests: sol.m_used,
            n,
            kappa: sol.kappa,
            h1_error: *err,
            residual: sol.diagnostics.residual_l2,
            support_size: sol.x_hat.nnz(),
            truncated: sol.diagnostics.truncated,
        })
        .collect();
    if let Some(path) = &args.csv {
        write_csv(Some(path), &rows)?;
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.h1_error).collect();
    let residuals: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let output = Output {
        problem: file.clone(),
        setup: setup.record(),
        reference: "full_petrov_galerkin_least_squares",
        rip,
        solutions: solutions.iter().map(|(_, sol, err)| sol.record(Some(*err))).collect(),
        median_h1_error: median(&errors),
        median_residual: median(&residuals),
    };
    write_json(args.out.as_deref(), &report("corsing", &args, output))
}
