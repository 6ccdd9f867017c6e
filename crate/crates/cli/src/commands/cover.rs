use std::path::PathBuf;

use clap::Args;
use corsing_core::analysis::{
    maurey_weak_cover, random_hull_targets, verify_weak_cover, CoverCheck, CoverParams, WeakCover,
};
use corsing_core::numkit::RandomStream;
use corsing_core::C64;
use serde::{Deserialize, Serialize};

use super::{system_ensemble, SystemKind};
use crate::report::{read_text, report, write_json, Failure};

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct CoverConfig {
    #[arg(long = "N", default_value_t = 32)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 128)]
    pub m: usize,
    #[arg(long, default_value_t = 4)]
    pub s: usize,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Width; defaults to sqrt(s)/2.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Number of random targets in the hull of the vertex set.
    #[arg(long, default_value_t = 50)]
    pub targets: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Serialize)]
pub struct CoverArgs {
    #[command(flatten)]
    config: CoverConfig,
    /// Verify an existing cover report instead of building one.
    #[arg(long)]
    verify: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Sample vectors (unscaled Fourier rows, `K = 1`) and targets of a config.
pub fn instance(c: &CoverConfig) -> Result<(Vec<Vec<C64>>, Vec<Vec<C64>>), Failure> {
    let rows = system_ensemble(SystemKind::Fourier, c.n, c.m, c.seed)?.sample_rows();
    let targets = random_hull_targets(c.n, c.s, c.targets, &RandomStream::new(c.seed, 2));
    Ok((rows, targets))
}

#[derive(Deserialize)]
struct StoredReport {
    config: StoredArgs,
    result: WeakCover,
}

#[derive(Deserialize)]
struct StoredArgs {
    config: CoverConfig,
}

#[derive(Serialize)]
struct Verification {
    cover: PathBuf,
    check: CoverCheck,
}

pub fn run(args: CoverArgs) -> Result<(), Failure> {
    if let Some(path) = &args.verify {
        let stored: StoredReport = serde_json::from_str(&read_text(path)?)?;
        let (rows, targets) = instance(&stored.config.config)?;
        let check = verify_weak_cover(&stored.result, &targets, &rows);
        let passed = check.passed;
        let failures: Vec<String> = check.failures.iter().map(|(_, m)| m.clone()).collect();
        write_json(args.out.as_deref(), &report("cover", &args, Verification { cover: path.clone(), check }))?;
        return if passed {
            Ok(())
        } else {
            Err(Failure::numeric(format!("cover verification failed: {}", failures.join("; "))))
        };
    }
    let c = &args.config;
    let (rows, targets) = instance(c)?;
    let params = CoverParams {
        s: c.s,
        rho: c.rho.unwrap_or((c.s as f64).sqrt() / 2.0),
        delta: c.delta,
        // Fourier rows are unimodular.
        k_bound: Some(1.0),
    };
    let cover = maurey_weak_cover(&targets, &rows, params, &RandomStream::new(c.seed, 3))?;
    let failed = cover.failures.clone();
    write_json(args.out.as_deref(), &report("cover", &args, cover))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::numeric(format!("targets {failed:?} not covered within the attempt cap")))
    }
}
