use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{binomial, check_enumeration, identity_deviation, Combinations, ComplexMatrix, RandomStream, ENUMERATION_CAP};
use crate::scalar::{abs2, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RipMethod {
    Exact,
    MonteCarlo,
}

/// Restricted isometry constant at one sparsity level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipReport<T> {
    /// Sparsity (or weighted sparsity budget).
    pub s: f64,
    pub epsilon_s: T,
    pub extremal_support: Vec<usize>,
    pub method: RipMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<usize>,
    pub supports_enumerated: u64,
    /// Only the empty support was admissible.
    #[serde(default)]
    pub degenerate: bool,
}

const CHUNK: usize = 1 << 14;

/// Scans supports in order, keeping the first maximiser.
pub(super) fn scan_supports<T: Real>(
    gram: &ComplexMatrix<T>,
    supports: impl Iterator<Item = Vec<usize>>,
) -> Result<(T, Vec<usize>, u64)> {
    let mut best: (T, Vec<usize>) = (T::neg_infinity(), Vec::new());
    let mut count = 0u64;
    let mut supports = supports.peekable();
    while supports.peek().is_some() {
        let chunk: Vec<Vec<usize>> = supports.by_ref().take(CHUNK).collect();
        count += chunk.len() as u64;
        let devs = chunk
            .par_iter()
            .map(|sup| identity_deviation(&gram.principal(sup)))
            .collect::<Result<Vec<T>>>()?;
        for (dev, sup) in devs.into_iter().zip(chunk) {
            if dev > best.0 {
                best = (dev, sup);
            }
        }
    }
    Ok((best.0, best.1, count))
}

/// `max_{|S| = s} ||A_S^H A_S - I||_2` by exhaustive enumeration.
pub fn rip_exact<T: Real>(a: &ComplexMatrix<T>, s: usize) -> Result<RipReport<T>> {
    let n = a.cols();
    if a.is_empty() {
        return Err(Error::dim("RIP constant of an empty matrix"));
    }
    let k = s.min(n);
    if k == 0 {
        return Ok(RipReport {
            s: s as f64,
            epsilon_s: T::zero(),
            extremal_support: Vec::new(),
            method: RipMethod::Exact,
            trials: None,
            supports_enumerated: 0,
            degenerate: true,
        });
    }
    check_enumeration(binomial(n, k), "use rip_monte_carlo for a lower bound")?;
    let gram = a.gram();
    let (eps, sup, count) = scan_supports(&gram, Combinations::new(n, k))?;
    Ok(RipReport {
        s: s as f64,
        epsilon_s: eps,
        extremal_support: sup,
        method: RipMethod::Exact,
        trials: None,
        supports_enumerated: count,
        degenerate: false,
    })
}

/// Lower bound on the RIP constant from `trials` random unit `s`-sparse
/// vectors: uniform support, normalized complex Gaussian coefficients.
/// Trial `t` draws from `rng.child(t)`, so the result does not depend on
/// the worker count.
pub fn rip_monte_carlo<T: Real>(
    a: &ComplexMatrix<T>,
    s: usize,
    trials: usize,
    rng: &RandomStream,
) -> Result<RipReport<T>> {
    let n = a.cols();
    if a.is_empty() {
        return Err(Error::dim("RIP constant of an empty matrix"));
    }
    if trials == 0 {
        return Err(Error::arg("need at least one trial"));
    }
    let k = s.min(n);
    if k == 0 {
        return Ok(RipReport {
            s: s as f64,
            epsilon_s: T::zero(),
            extremal_support: Vec::new(),
            method: RipMethod::MonteCarlo,
            trials: Some(trials),
            supports_enumerated: 0,
            degenerate: true,
        });
    }
    let gram = a.gram();
    let (dev, support) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng.child(t as u64);
            let sup = r.subset(n, k);
            let coeffs: Vec<Complex<f64>> = (0..k).map(|_| r.complex_normal()).collect();
            let nrm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let f: Vec<Complex<T>> = coeffs
                .iter()
                .map(|z| Complex::new(T::lit(z.re / nrm), T::lit(z.im / nrm)))
                .collect();
            // f^H G_S f
            let mut q = T::zero();
            for (a_, &ia) in sup.iter().enumerate() {
                q += abs2(f[a_]) * gram.get(ia, ia).re;
                for (b_, &ib) in sup.iter().enumerate().skip(a_ + 1) {
                    q += T::lit(2.0) * (f[a_].conj() * gram.get(ia, ib) * f[b_]).re;
                }
            }
            ((q - T::one()).abs(), sup)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((T::neg_infinity(), Vec::new()), |best, cur| if cur.0 > best.0 { cur } else { best });
    Ok(RipReport {
        s: s as f64,
        epsilon_s: dev,
        extremal_support: support,
        method: RipMethod::MonteCarlo,
        trials: Some(trials),
        supports_enumerated: 0,
        degenerate: false,
    })
}

/// Maximal supports `S` with `sum_{j in S} w_j^2 <= budget`, in
/// lexicographic order.
fn maximal_admissible(w2: &[f64], budget: f64) -> Result<Vec<Vec<usize>>> {
    fn walk(
        w2: &[f64],
        budget: f64,
        start: usize,
        used: f64,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        let mut extended = false;
        for j in start..w2.len() {
            if used + w2[j] <= budget {
                extended = true;
                cur.push(j);
                walk(w2, budget, j + 1, used + w2[j], cur, out)?;
                cur.pop();
            }
        }
        if !extended {
            // Maximal iff no skipped index fits either.
            let fits = (0..w2.len()).any(|j| !cur.contains(&j) && used + w2[j] <= budget);
            if !fits {
                out.push(cur.clone());
                if out.len() as u128 > ENUMERATION_CAP {
                    return Err(Error::EnumerationCap {
                        count: out.len() as u128,
                        cap: ENUMERATION_CAP,
                        hint: "lower the weighted sparsity budget",
                    });
                }
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(w2, budget, 0, 0.0, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Weighted RIP constant over `{f : sum_{f_j != 0} w_j^2 <= s, ||f|| = 1}`,
/// by enumerating maximal admissible supports.
pub fn weighted_rip_exact<T: Real>(
    a: &ComplexMatrix<T>,
    s: f64,
    w: &crate::recovery::WeightVector<T>,
) -> Result<RipReport<T>> {
    let n = a.cols();
    if a.is_empty() {
        return Err(Error::dim("RIP constant of an empty matrix"));
    }
    if w.len() != n {
        return Err(Error::dim(format!("{} weights for {n} columns", w.len())));
    }
    let w2: Vec<f64> = w.as_slice().iter().map(|v| v.to_f64_lossy().powi(2)).collect();
    let supports = maximal_admissible(&w2, s)?;
    if supports.len() == 1 && supports[0].is_empty() {
        return Ok(RipReport {
            s,
            epsilon_s: T::zero(),
            extremal_support: Vec::new(),
            method: RipMethod::Exact,
            trials: None,
            supports_enumerated: 1,
            degenerate: true,
        });
    }
    let gram = a.gram();
    let (eps, sup, count) = scan_supports(&gram, supports.into_iter())?;
    Ok(RipReport {
        s,
        epsilon_s: eps,
        extremal_support: sup,
        method: RipMethod::Exact,
        trials: None,
        supports_enumerated: count,
        degenerate: false,
    })
}
