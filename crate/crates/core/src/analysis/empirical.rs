use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numkit::{binomial, check_enumeration, Combinations, ComplexMatrix};
use crate::systems::MeasurementEnsemble;
use crate::C64;

/// Second-moment model `f -> E|<f, X>|^2` of the sampling distribution.
pub enum Covariance<'a> {
    /// `E|<f,X>|^2 = ||f||^2`.
    Identity,
    /// Explicit Hermitian Gram `E[X^H X]`.
    Gram(ComplexMatrix<f64>),
    /// Quadratic form; the Gram is recovered by polarization.
    Quadratic(&'a (dyn Fn(&[C64]) -> f64 + Sync)),
}

impl Covariance<'_> {
    fn gram(&self, n: usize) -> Result<ComplexMatrix<f64>> {
        let g = match self {
            Covariance::Identity => ComplexMatrix::identity(n),
            Covariance::Gram(g) => {
                if g.shape() != (n, n) {
                    return Err(Error::dim(format!(
                        "covariance Gram is {}x{}, expected {n}x{n}",
                        g.rows(),
                        g.cols()
                    )));
                }
                g.clone()
            }
            Covariance::Quadratic(q) => {
                let unit = |pairs: &[(usize, C64)]| {
                    let mut f = vec![C64::new(0.0, 0.0); n];
                    for &(j, v) in pairs {
                        f[j] = v;
                    }
                    q(&f)
                };
                let one = C64::new(1.0, 0.0);
                let diag: Vec<f64> = (0..n).map(|j| unit(&[(j, one)])).collect();
                let mut data = vec![C64::new(0.0, 0.0); n * n];
                for j in 0..n {
                    data[j * n + j] = C64::new(diag[j], 0.0);
                    for k in j + 1..n {
                        let re = (unit(&[(j, one), (k, one)]) - diag[j] - diag[k]) / 2.0;
                        let im = (diag[j] + diag[k] - unit(&[(j, one), (k, C64::i())])) / 2.0;
                        data[j * n + k] = C64::new(re, im);
                        data[k * n + j] = C64::new(re, -im);
                    }
                }
                ComplexMatrix::new(n, n, data)
                    .map_err(|_| Error::arg("covariance Gram unavailable: quadratic form returned non-finite values"))?
            }
        };
        if !g.is_finite() {
            return Err(Error::arg("covariance Gram unavailable: non-finite entries"));
        }
        Ok(g)
    }
}

/// `sup_{f unit, s-sparse} |(1/m) sum_i |<f,X_i>|^2 - E|<f,X>|^2|`, computed
/// per support as the spectral norm of the restricted Gram difference.
pub fn empirical_process_sup(
    ensemble: &MeasurementEnsemble,
    covariance: &Covariance<'_>,
    s: usize,
) -> Result<f64> {
    let n = ensemble.n();
    let m = ensemble.m();
    if m == 0 || n == 0 {
        return Err(Error::dim("empty ensemble"));
    }
    let k = s.min(n);
    if k == 0 {
        return Ok(0.0);
    }
    check_enumeration(binomial(n, k), "lower s")?;
    let sigma = covariance.gram(n)?;
    let factor = 1.0 / (m as f64 * ensemble.scaling * ensemble.scaling);
    let empirical = ensemble.matrix.gram().scale_real(factor);
    // Shift by I so that the per-support kernel is the shared ||H - I||_2.
    let shifted = ComplexMatrix::from_fn(n, n, |i, j| {
        let d = empirical.get(i, j) - sigma.get(i, j);
        if i == j {
            d + Complex::new(1.0, 0.0)
        } else {
            d
        }
    });
    let (best, _, _) = super::rip::scan_supports(&shifted, Combinations::new(n, k))?;
    Ok(best.max(0.0))
}
