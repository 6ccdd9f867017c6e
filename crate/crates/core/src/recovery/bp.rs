//! Quadratically constrained basis pursuit
//! `min ||z||_1  s.t.  ||A z - y||_2 <= zeta` by ADMM on the splitting
//! `x = u`, `x` constrained to the feasible set and `u` carrying the `l1`
//! term. The feasible-set projection is exact: with `A A^H = U diag(s) U^H`
//! it reduces to a scalar root find for the Lagrange multiplier.
//! Termination is certified by a primal-dual gap.

use num_complex::Complex;

use super::{support_of, RecoveryOutcome, WeightVector};
use crate::error::{Error, Result};
use crate::numkit::{hermitian_eigen, ComplexMatrix};
use crate::scalar::{abs2, dot, norm1, norm2, Real};

#[derive(Clone, Debug)]
pub struct BpOptions {
    pub max_iterations: usize,
    /// Gap evaluation cadence.
    pub check_every: usize,
}

impl Default for BpOptions {
    fn default() -> Self {
        Self { max_iterations: 200_000, check_every: 10 }
    }
}

struct FeasibleSet<'a, T> {
    a: &'a ComplexMatrix<T>,
    y: &'a [Complex<T>],
    zeta: T,
    /// Eigenvectors of `A A^H` (columns) and eigenvalues.
    u: ComplexMatrix<T>,
    s: Vec<T>,
    /// Eigenvalues treated as zero.
    range_tol: T,
}

impl<'a, T: Real> FeasibleSet<'a, T> {
    fn new(a: &'a ComplexMatrix<T>, y: &'a [Complex<T>], zeta: T) -> Result<Self> {
        let eig = hermitian_eigen(&a.outer_gram())?;
        let smax = eig.values.last().copied().unwrap_or_else(T::zero).max(T::zero());
        let range_tol = smax * T::epsilon() * T::from_count(a.rows().max(a.cols())) * T::lit(100.0);
        Ok(Self { a, y, zeta, u: eig.vectors, s: eig.values, range_tol })
    }

    fn in_range(&self, i: usize) -> bool {
        self.s[i] > self.range_tol
    }

    /// Distance from `y` to the range of `A`.
    fn distance_to_range(&self) -> Result<T> {
        let c = self.u.adjoint_matvec(self.y)?;
        Ok((0..c.len())
            .filter(|&i| !self.in_range(i))
            .map(|i| abs2(c[i]))
            .sum::<T>()
            .sqrt())
    }

    /// Euclidean projection of `p` onto `{x : ||A x - y|| <= zeta}`.
    fn project(&self, p: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let ap = self.a.matvec(p)?;
        let r: Vec<Complex<T>> = ap.iter().zip(self.y).map(|(u, v)| u - v).collect();
        if norm2(&r) <= self.zeta {
            return Ok(p.to_vec());
        }
        let c = self.u.adjoint_matvec(&r)?;
        let fixed: T = (0..c.len()).filter(|&i| !self.in_range(i)).map(|i| abs2(c[i])).sum();
        let target = self.zeta * self.zeta;
        let residual2 = |lam: T| -> T {
            fixed
                + (0..c.len())
                    .filter(|&i| self.in_range(i))
                    .map(|i| {
                        let d = T::one() + lam * self.s[i];
                        abs2(c[i]) / (d * d)
                    })
                    .sum::<T>()
        };
        // Multiplier weights lam / (1 + lam s_i); the zeta = 0 limit is 1 / s_i.
        let weights: Vec<T> = if self.zeta == T::zero() || fixed >= target {
            (0..c.len())
                .map(|i| if self.in_range(i) { T::one() / self.s[i] } else { T::zero() })
                .collect()
        } else {
            let mut hi = T::one() / self.s.iter().copied().fold(T::zero(), T::max).max(T::min_positive_value());
            let mut guard = 0;
            while residual2(hi) > target {
                hi = hi * T::lit(4.0);
                guard += 1;
                if guard > 4000 || !hi.is_finite() {
                    break;
                }
            }
            let mut lo = T::zero();
            for _ in 0..200 {
                let mid = lo + (hi - lo) * T::lit(0.5);
                if mid <= lo || mid >= hi {
                    break;
                }
                if residual2(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // Upper end keeps the constraint satisfied.
            (0..c.len())
                .map(|i| if self.in_range(i) { hi / (T::one() + hi * self.s[i]) } else { T::zero() })
                .collect()
        };
        let scaled: Vec<Complex<T>> = c.iter().zip(&weights).map(|(ci, w)| ci * *w).collect();
        let back = self.u.matvec(&scaled)?;
        let corr = self.a.adjoint_matvec(&back)?;
        Ok(p.iter().zip(&corr).map(|(pi, ci)| pi - ci).collect())
    }

    /// Dual objective `Re<lam, y> - zeta ||lam||` after rescaling `lam` to
    /// satisfy `||A^H lam||_inf <= 1`.
    fn dual_value(&self, lam: &[Complex<T>]) -> Result<T> {
        let g = self.a.adjoint_matvec(lam)?;
        let ginf = g.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if ginf == T::zero() {
            return Ok(T::zero());
        }
        let t = T::one() / ginf;
        Ok(t * (dot(lam, self.y).re - self.zeta * norm2(lam)))
    }

    /// `(A A^H)^+ A v`, the least-squares solution of `A^H lam = v`.
    fn dual_from_subgradient(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let av = self.a.matvec(v)?;
        let c = self.u.adjoint_matvec(&av)?;
        let scaled: Vec<Complex<T>> = c
            .iter()
            .enumerate()
            .map(|(i, ci)| if self.in_range(i) { ci / self.s[i] } else { Complex::new(T::zero(), T::zero()) })
            .collect();
        self.u.matvec(&scaled)
    }
}

fn soft_threshold<T: Real>(z: Complex<T>, t: T) -> Complex<T> {
    let r = z.norm();
    if r <= t {
        Complex::new(T::zero(), T::zero())
    } else {
        z * ((r - t) / r)
    }
}

/// Solves `min ||z||_1` subject to `||A z - y||_2 <= zeta`.
///
/// Returns a feasible point whose objective is within the certified gap of
/// the optimum; `converged` reports whether that gap fell below `tol`.
pub fn basis_pursuit<T: Real>(
    a: &ComplexMatrix<T>,
    y: &[Complex<T>],
    zeta: T,
    tol: T,
) -> Result<RecoveryOutcome<T>> {
    basis_pursuit_with(a, y, zeta, tol, &BpOptions::default())
}

pub fn basis_pursuit_with<T: Real>(
    a: &ComplexMatrix<T>,
    y: &[Complex<T>],
    zeta: T,
    tol: T,
    opts: &BpOptions,
) -> Result<RecoveryOutcome<T>> {
    let (m, n) = a.shape();
    if y.len() != m {
        return Err(Error::dim(format!("A has {m} rows, y has {} entries", y.len())));
    }
    if !(zeta >= T::zero()) || !(tol > T::zero()) {
        return Err(Error::arg("zeta must be nonnegative and tol positive"));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let ynorm = norm2(y);
    if ynorm <= zeta {
        return Ok(RecoveryOutcome {
            estimate: vec![zero; n],
            support: Vec::new(),
            residual_l2: ynorm,
            iterations: 0,
            objective: T::zero(),
            converged: true,
            degenerate: false,
            selection_path: Vec::new(),
            residual_history: Vec::new(),
            duality_gap: Some(T::zero()),
        });
    }
    if n == 0 {
        return Err(Error::Infeasible("no columns and ||y|| > zeta".into()));
    }
    let set = FeasibleSet::new(a, y, zeta)?;
    let dist = set.distance_to_range()?;
    let slack = zeta * T::lit(1e-9) + T::lit(1e-12).max(T::epsilon() * ynorm * T::lit(100.0));
    if dist > zeta + slack {
        return Err(Error::Infeasible(format!(
            "distance from y to range(A) is {dist}, exceeding zeta = {zeta}"
        )));
    }

    let mut x = set.project(&vec![zero; n])?;
    let mut u = x.clone();
    let mut w = vec![zero; n];
    let scale = x.iter().fold(T::zero(), |m, z| m.max(z.norm())).max(T::min_positive_value());
    let mut rho = T::lit(10.0) / scale;
    let mut best: Option<(T, Vec<Complex<T>>, T)> = None;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        let v: Vec<Complex<T>> = u.iter().zip(&w).map(|(a, b)| a - b).collect();
        x = set.project(&v)?;
        let u_prev = std::mem::replace(
            &mut u,
            x.iter().zip(&w).map(|(xi, wi)| soft_threshold(xi + wi, T::one() / rho)).collect(),
        );
        for ((wi, xi), ui) in w.iter_mut().zip(&x).zip(&u) {
            *wi = *wi + xi - ui;
        }
        let primal = norm2(&x.iter().zip(&u).map(|(a, b)| a - b).collect::<Vec<_>>());
        let dual = rho * norm2(&u.iter().zip(&u_prev).map(|(a, b)| a - b).collect::<Vec<_>>());

        if iterations % opts.check_every == 0 {
            let objective = norm1(&x);
            let fit = a.matvec(&x)?;
            let r: Vec<Complex<T>> = y.iter().zip(&fit).map(|(p, q)| p - q).collect();
            let mut dual_val = set.dual_value(&r)?;
            let sub: Vec<Complex<T>> = w.iter().map(|z| z * rho).collect();
            dual_val = dual_val.max(set.dual_value(&set.dual_from_subgradient(&sub)?)?);
            let gap = (objective - dual_val).max(T::zero());
            if best.as_ref().map_or(true, |(g, _, _)| gap < *g) {
                best = Some((gap, x.clone(), objective));
            }
            if gap <= tol {
                converged = true;
                break;
            }
            // Residual balancing.
            let ten = T::lit(10.0);
            if primal > ten * dual {
                rho = rho * T::lit(2.0);
                w.iter_mut().for_each(|z| *z = *z * T::lit(0.5));
            } else if dual > ten * primal {
                rho = rho * T::lit(0.5);
                w.iter_mut().for_each(|z| *z = *z * T::lit(2.0));
            }
        }
    }
    let (gap, estimate, objective) = best.unwrap_or_else(|| {
        let o = norm1(&x);
        (T::infinity(), x.clone(), o)
    });
    let fit = a.matvec(&estimate)?;
    let residual_l2 = norm2(&y.iter().zip(&fit).map(|(p, q)| p - q).collect::<Vec<_>>());
    Ok(RecoveryOutcome {
        support: support_of(&estimate),
        estimate,
        residual_l2,
        iterations,
        objective,
        converged,
        degenerate: false,
        selection_path: Vec::new(),
        residual_history: Vec::new(),
        duality_gap: Some(gap),
    })
}

/// `min sum_j w_j |z_j|` subject to `||A z - y||_2 <= zeta`, solved as plain
/// basis pursuit in the variable `u = W z`.
pub fn weighted_basis_pursuit<T: Real>(
    a: &ComplexMatrix<T>,
    y: &[Complex<T>],
    w: &WeightVector<T>,
    zeta: T,
    tol: T,
) -> Result<RecoveryOutcome<T>> {
    if w.len() != a.cols() {
        return Err(Error::dim(format!("{} weights for {} columns", w.len(), a.cols())));
    }
    let inv: Vec<T> = w.as_slice().iter().map(|&v| T::one() / v).collect();
    let scaled = a.scale_columns(&inv);
    let mut out = basis_pursuit(&scaled, y, zeta, tol)?;
    for (z, &s) in out.estimate.iter_mut().zip(&inv) {
        *z = *z * s;
    }
    let fit = a.matvec(&out.estimate)?;
    out.residual_l2 = norm2(&y.iter().zip(&fit).map(|(p, q)| p - q).collect::<Vec<_>>());
    out.support = support_of(&out.estimate);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[f64]) -> Vec<Complex<f64>> {
        v.iter().map(|&a| Complex::new(a, 0.0)).collect()
    }

    #[test]
    fn large_zeta_gives_zero() {
        let a = ComplexMatrix::<f64>::identity(3);
        let out = basis_pursuit(&a, &r(&[1.0, 2.0, 2.0]), 3.0, 1e-9).unwrap();
        assert_eq!(out.objective, 0.0);
        assert!(out.estimate.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn identity_exact_constraint() {
        let a = ComplexMatrix::<f64>::identity(3);
        let y = vec![Complex::new(1.0, -1.0), Complex::new(0.0, 0.0), Complex::new(-2.0, 0.5)];
        let out = basis_pursuit(&a, &y, 0.0, 1e-9).unwrap();
        assert!(out.converged);
        for (e, t) in out.estimate.iter().zip(&y) {
            assert!((e - t).norm() < 1e-9);
        }
    }

    #[test]
    fn infeasible_is_reported() {
        let a = ComplexMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap();
        assert!(matches!(basis_pursuit(&a, &r(&[0.0, 1.0]), 0.5, 1e-8), Err(Error::Infeasible(_))));
    }

    #[test]
    fn underdetermined_picks_sparse_solution() {
        // y = a_0 exactly; a_1 = (a_0 + a_2)/2-ish decoys.
        let a = ComplexMatrix::from_real(2, 3, &[1.0, 0.6, 0.0, 0.0, 0.6, 1.0]).unwrap();
        let out = basis_pursuit(&a, &r(&[1.0, 0.0]), 0.0, 1e-10).unwrap();
        assert!(out.converged, "gap {:?}", out.duality_gap);
        assert!((out.objective - 1.0).abs() < 1e-8);
    }

    #[test]
    fn heavy_weight_suppresses_coordinate() {
        // Column 0 and column 1 both reach y; weight 100 on column 0.
        let a = ComplexMatrix::from_real(1, 2, &[1.0, 1.0]).unwrap();
        let w = WeightVector::new(vec![100.0, 1.0]).unwrap();
        let out = weighted_basis_pursuit(&a, &r(&[1.0]), &w, 0.0, 1e-9).unwrap();
        assert!(out.estimate[0].norm() < 1e-8);
        assert!((out.estimate[1].re - 1.0).abs() < 1e-8);
        assert!((out.objective - 1.0).abs() < 1e-8);
    }
}
