use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{ComplexMatrix, RandomStream};
use crate::scalar::norm2;
use crate::C64;

/// Heuristic estimate of the robust null space constant. Never a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NspEstimate {
    pub s: usize,
    pub alpha: f64,
    /// `l1` radius `(2 + 1/alpha) sqrt(s)` of the search set.
    pub radius: f64,
    /// Smallest `||Az||_2` found; an upper bound on the true infimum.
    pub inf_estimate: f64,
    /// `1 / inf_estimate`; infinite when a null direction was found.
    pub tau_estimate: f64,
    pub tau_infinite: bool,
    pub certified: bool,
    pub trials: usize,
    pub best_direction: Vec<C64>,
}

fn l1(z: &[C64]) -> f64 {
    z.iter().map(|v| v.norm()).sum()
}

fn normalize(z: &mut [C64]) {
    let n = norm2(z);
    for v in z.iter_mut() {
        *v /= n;
    }
}

/// Random unit vector with `||z||_1 <= radius`: dense Gaussian on a random
/// support, trimmed to its largest entries until it fits.
fn candidate(n: usize, radius: f64, rng: &mut RandomStream) -> Vec<C64> {
    let k = 1 + rng.index(n);
    let support = rng.subset(n, k);
    let mut entries: Vec<(usize, C64)> = support.into_iter().map(|j| (j, rng.complex_normal())).collect();
    entries.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()).then(a.0.cmp(&b.0)));
    loop {
        let mut z = vec![C64::new(0.0, 0.0); n];
        for &(j, v) in &entries {
            z[j] = v;
        }
        normalize(&mut z);
        if l1(&z) <= radius || entries.len() == 1 {
            return z;
        }
        entries.pop();
    }
}

/// Projected descent on `||Az||^2` over the unit sphere, keeping only steps
/// that stay inside the `l1` ball and improve.
fn refine(a: &ComplexMatrix<f64>, z: &mut Vec<C64>, radius: f64, value: &mut f64) -> Result<()> {
    let mut step = 0.5;
    for _ in 0..200 {
        let az = a.matvec(z)?;
        let grad = a.adjoint_matvec(&az)?;
        let mut trial: Vec<C64> = z.iter().zip(&grad).map(|(v, g)| v - g * step).collect();
        normalize(&mut trial);
        let val = norm2(&a.matvec(&trial)?);
        if l1(&trial) <= radius && val < *value {
            *z = trial;
            *value = val;
        } else {
            step *= 0.5;
            if step < 1e-8 {
                break;
            }
        }
    }
    Ok(())
}

/// Monte Carlo estimate of `inf ||Az||_2` over unit vectors in
/// `(2 + 1/alpha) sqrt(s) B_1`.
pub fn nsp_lower_bound(
    a: &ComplexMatrix<f64>,
    s: usize,
    alpha: f64,
    trials: usize,
    rng: &RandomStream,
) -> Result<NspEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Range {
            parameter: "alpha",
            value: alpha,
            interval: "(0, 1)".into(),
        });
    }
    if s == 0 || trials == 0 {
        return Err(Error::arg("need s >= 1 and trials >= 1"));
    }
    let n = a.cols();
    if a.is_empty() {
        return Err(Error::dim("empty matrix"));
    }
    let radius = (2.0 + 1.0 / alpha) * (s as f64).sqrt();
    let scored = (0..trials)
        .into_par_iter()
        .map(|t| {
            let z = candidate(n, radius, &mut rng.child(t as u64));
            let v = norm2(&a.matvec(&z)?);
            Ok((v, z))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = (f64::INFINITY, Vec::new());
    for j in 0..n {
        let c = a.column_norm(j);
        if c < best.0 || best.1.is_empty() {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            best = (c, e);
        }
    }
    for cand in scored {
        if cand.0 < best.0 {
            best = cand;
        }
    }
    let (mut value, mut z) = best;
    refine(a, &mut z, radius, &mut value)?;
    let tau_infinite = value <= f64::EPSILON * a.frobenius().max(1.0);
    Ok(NspEstimate {
        s,
        alpha,
        radius,
        inf_estimate: value,
        tau_estimate: if tau_infinite { f64::INFINITY } else { 1.0 / value },
        tau_infinite,
        certified: false,
        trials,
        best_direction: z,
    })
}
