use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Draws, FunctionSystem, MeasurementEnsemble};
use crate::error::{Error, Result};
use crate::numkit::{
    binomial, check_enumeration, extremal_gram_eigs, hermitian_eigenvalues, Combinations, ComplexMatrix,
    RandomStream,
};
use crate::scalar::{abs2, Real};
use crate::C64;

/// Per-row local coherence bounds `nu_j >= max_n |B_jn|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceProfile {
    pub nu: Vec<f64>,
    pub nu_l1: f64,
}

impl CoherenceProfile {
    /// Wraps a caller-supplied bound, validating nonnegativity.
    pub fn from_bounds(nu: Vec<f64>) -> Result<Self> {
        if let Some(j) = nu.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::arg(format!("coherence bound nu[{j}] = {} is not a finite nonnegative value", nu[j])));
        }
        let nu_l1 = nu.iter().sum();
        Ok(Self { nu, nu_l1 })
    }

    /// Checks `nu_j >= max_n |B_jn|^2` row by row.
    pub fn dominates<T: Real>(&self, b: &ComplexMatrix<T>) -> bool {
        self.nu.len() == b.rows()
            && (0..b.rows()).all(|j| {
                let row_max = b.row(j).iter().fold(0.0f64, |m, &z| m.max(abs2(z).to_f64_lossy()));
                self.nu[j] >= row_max
            })
    }
}

/// `A_ij = psi_j(omega_i) / sqrt(m C_psi)` with `omega_i` i.i.d. from the
/// system's measure.
pub fn sample_riesz_matrix(
    sys: &dyn FunctionSystem,
    m: usize,
    rng: &mut RandomStream,
) -> Result<MeasurementEnsemble> {
    if m == 0 {
        return Err(Error::arg("need at least one sample (m >= 1)"));
    }
    let n = sys.len();
    let (_, upper) = sys.riesz_bounds();
    let scaling = 1.0 / ((m as f64) * upper).sqrt();
    let points: Vec<f64> = (0..m).map(|_| sys.sample_point(rng)).collect();
    let matrix = ComplexMatrix::from_fn(m, n, |i, j| sys.evaluate(j, points[i]) * scaling);
    Ok(MeasurementEnsemble {
        matrix,
        scaling,
        draws: Draws::Points(points),
        probabilities: None,
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    })
}

/// The tight profile `nu_j = max_n |B_jn|^2`.
pub fn local_coherence<T: Real>(b: &ComplexMatrix<T>) -> Result<CoherenceProfile> {
    if b.is_empty() {
        return Err(Error::dim("local coherence of an empty matrix"));
    }
    let nu: Vec<f64> = (0..b.rows())
        .map(|j| b.row(j).iter().fold(T::zero(), |m, &z| m.max(abs2(z))).to_f64_lossy())
        .collect();
    CoherenceProfile::from_bounds(nu)
}

/// Importance-samples `m` rows of `B` with probability `nu_j / ||nu||_1`,
/// rescales each by `sqrt(||nu||_1 / nu_j)` and the whole matrix by
/// `1 / sqrt(m C_B)`. Rows with `nu_j = 0` are never drawn.
pub fn coherence_sampler(
    b: &ComplexMatrix<f64>,
    profile: &CoherenceProfile,
    c_b: f64,
    m: usize,
    rng: &mut RandomStream,
) -> Result<MeasurementEnsemble> {
    if m == 0 {
        return Err(Error::arg("need at least one sample (m >= 1)"));
    }
    if !(c_b > 0.0 && c_b.is_finite()) {
        return Err(Error::arg(format!("C_B must be positive, got {c_b}")));
    }
    if profile.nu.len() != b.rows() {
        return Err(Error::dim(format!(
            "profile has {} entries for {} rows",
            profile.nu.len(),
            b.rows()
        )));
    }
    if !profile.dominates(b) {
        return Err(Error::arg("profile is not a local coherence bound for B"));
    }
    if profile.nu_l1 <= 0.0 {
        return Err(Error::Sampling("all-zero coherence profile".into()));
    }
    let probabilities: Vec<f64> = profile.nu.iter().map(|v| v / profile.nu_l1).collect();
    let cumulative: Vec<f64> = profile
        .nu
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let scaling = 1.0 / ((m as f64) * c_b).sqrt();
    let rows: Vec<usize> = (0..m).map(|_| rng.categorical(&cumulative)).collect();
    let mut data = Vec::with_capacity(m * b.cols());
    for &j in &rows {
        let nu_j = profile.nu[j];
        if nu_j <= 0.0 {
            return Err(Error::Sampling(format!("drew row {j} with zero coherence")));
        }
        let w = (profile.nu_l1 / nu_j).sqrt() * scaling;
        data.extend(b.row(j).iter().map(|z| z * w));
    }
    Ok(MeasurementEnsemble {
        matrix: ComplexMatrix::new(m, b.cols(), data)?,
        scaling,
        draws: Draws::Rows(rows),
        probabilities: Some(probabilities),
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    })
}

/// Minimum and maximum `s`-sparse eigenvalues of `B^H B` by exhaustive
/// support enumeration.
pub fn sparse_eigen_bounds<T: Real>(b: &ComplexMatrix<T>, s: usize) -> Result<(T, T)> {
    let n = b.cols();
    if b.is_empty() {
        return Err(Error::dim("sparse eigenvalues of an empty matrix"));
    }
    if s == 0 || s > n {
        return Err(Error::arg(format!("sparsity s = {s} must lie in 1..={n}")));
    }
    check_enumeration(binomial(n, s), "use a Monte Carlo estimate instead")?;
    if s == n {
        return extremal_gram_eigs(b);
    }
    let gram = b.gram();
    let supports: Vec<Vec<usize>> = Combinations::new(n, s).collect();
    let extremes = supports
        .par_iter()
        .map(|sup| {
            let vals = hermitian_eigenvalues(&gram.principal(sup))?;
            Ok((vals[0].max(T::zero()), vals[vals.len() - 1]))
        })
        .collect::<Result<Vec<(T, T)>>>()?;
    Ok(extremes
        .into_iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), (a, b)| (lo.min(a), hi.max(b))))
}

/// Unbiased squared-norm estimate `(1/m) sum |<X_i, f>|^2` for an
/// ensemble's unscaled rows.
pub fn empirical_energy(ensemble: &MeasurementEnsemble, f: &[C64]) -> Result<f64> {
    let af = ensemble.matrix.matvec(f)?;
    let s2 = ensemble.scaling * ensemble.scaling;
    Ok(af.iter().map(|z| z.norm_sqr()).sum::<f64>() / s2 / ensemble.m() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::fourier_system;

    #[test]
    fn fourier_entries_have_modulus_inverse_sqrt_m() {
        let sys = fourier_system(6).unwrap();
        let mut rng = RandomStream::new(3, 0);
        let e = sample_riesz_matrix(&sys, 9, &mut rng).unwrap();
        for z in e.matrix.as_slice() {
            assert!((z.norm() - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(e.draws.len(), 9);
        let one = sample_riesz_matrix(&fourier_system(1).unwrap(), 1, &mut rng).unwrap();
        assert!((one.matrix.get(0, 0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coherence_of_identity_and_row() {
        let p = local_coherence(&ComplexMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(p.nu, vec![1.0, 1.0, 1.0]);
        assert_eq!(p.nu_l1, 3.0);
        let b = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(local_coherence(&b).unwrap().nu[0], 4.0);
    }

    #[test]
    fn uniform_profile_rescales_by_sqrt_rows() {
        let b = ComplexMatrix::<f64>::identity(4);
        let prof = CoherenceProfile::from_bounds(vec![1.0; 4]).unwrap();
        let mut rng = RandomStream::new(1, 2);
        let e = coherence_sampler(&b, &prof, 1.0, 5, &mut rng).unwrap();
        assert_eq!(e.draws.len(), 5);
        for p in e.probabilities.as_ref().unwrap() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        // Entry = sqrt(M) / sqrt(m C_B).
        let expect = 2.0 / 5f64.sqrt();
        for i in 0..5 {
            let nz = e.matrix.row(i).iter().filter(|z| z.norm() > 0.0).count();
            assert_eq!(nz, 1);
            assert!((e.matrix.row(i).iter().map(|z| z.norm()).sum::<f64>() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_rows_never_drawn_and_all_zero_rejected() {
        let b = ComplexMatrix::from_real(3, 1, &[1.0, 0.0, 1.0]).unwrap();
        let prof = local_coherence(&b).unwrap();
        let mut rng = RandomStream::new(9, 0);
        let e = coherence_sampler(&b, &prof, 1.0, 200, &mut rng).unwrap();
        match &e.draws {
            Draws::Rows(r) => assert!(r.iter().all(|&j| j != 1)),
            _ => unreachable!(),
        }
        let z = ComplexMatrix::<f64>::zeros(2, 2);
        let zp = local_coherence(&z).unwrap();
        assert!(matches!(coherence_sampler(&z, &zp, 1.0, 3, &mut rng), Err(Error::Sampling(_))));
    }

    #[test]
    fn sparse_eigs_of_diagonal() {
        let b = ComplexMatrix::diag(&[1.0, 2.0, 3.0]);
        let (lo, hi): (f64, f64) = sparse_eigen_bounds(&b, 1).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 9.0).abs() < 1e-13);
        let (lo, hi) = sparse_eigen_bounds(&ComplexMatrix::<f64>::identity(5), 3).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
    }

    #[test]
    fn enumeration_cap_refuses() {
        let b = ComplexMatrix::<f64>::zeros(1, 200);
        assert!(matches!(sparse_eigen_bounds(&b, 5), Err(Error::EnumerationCap { .. })));
    }
}
