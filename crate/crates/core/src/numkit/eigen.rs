use num_complex::Complex;

use super::{iteration_cap, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{abs2, Real};

/// Eigen-decomposition of a Hermitian matrix; values ascending, vectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form. Returns `(diag, subdiag, unitary)` with `H = U T U^H`; `unitary` is
/// only accumulated on request.
fn tridiagonalize<T: Real>(
    h: &ComplexMatrix<T>,
    want_vectors: bool,
) -> (Vec<T>, Vec<T>, Option<Vec<Complex<T>>>) {
    let n = h.rows();
    let zero = Complex::new(T::zero(), T::zero());
    let half = T::lit(0.5);
    // Symmetrized working copy.
    let mut a: Vec<Complex<T>> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            (h.get(i, j) + h.get(j, i).conj()) * half
        })
        .collect();
    let mut q: Option<Vec<Complex<T>>> = want_vectors.then(|| {
        (0..n * n)
            .map(|k| if k / n == k % n { Complex::new(T::one(), T::zero()) } else { zero })
            .collect()
    });
    let two = T::lit(2.0);
    let mut v = vec![zero; n];
    let mut w = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let xnorm = crate::scalar::norm2(&(lo..n).map(|i| a[i * n + k]).collect::<Vec<_>>());
        if xnorm == T::zero() {
            continue;
        }
        let x0 = a[lo * n + k];
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        for i in lo..n {
            v[i] = a[i * n + k];
        }
        v[lo] = v[lo] - alpha;
        let vn = crate::scalar::norm2(&v[lo..n]);
        if vn == T::zero() {
            continue;
        }
        for vi in &mut v[lo..n] {
            *vi = *vi / vn;
        }
        // Left: A <- (I - 2 v v^H) A on rows lo..n.
        for j in 0..n {
            let mut s = zero;
            for i in lo..n {
                s = s + v[i].conj() * a[i * n + j];
            }
            w[j] = s * two;
        }
        for i in lo..n {
            for j in 0..n {
                a[i * n + j] = a[i * n + j] - v[i] * w[j];
            }
        }
        // Right: A <- A (I - 2 v v^H) on columns lo..n.
        for i in 0..n {
            let mut s = zero;
            for j in lo..n {
                s = s + a[i * n + j] * v[j];
            }
            let s = s * two;
            for j in lo..n {
                a[i * n + j] = a[i * n + j] - s * v[j].conj();
            }
        }
        if let Some(q) = q.as_mut() {
            for i in 0..n {
                let mut s = zero;
                for j in lo..n {
                    s = s + q[i * n + j] * v[j];
                }
                let s = s * two;
                for j in lo..n {
                    q[i * n + j] = q[i * n + j] - s * v[j].conj();
                }
            }
        }
    }
    // Rotate the complex subdiagonal onto the nonnegative reals.
    let diag: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut sub = vec![T::zero(); n];
    let mut phase = vec![Complex::new(T::one(), T::zero()); n];
    for k in 0..n.saturating_sub(1) {
        let e = a[(k + 1) * n + k];
        let r = e.norm();
        sub[k] = r;
        phase[k + 1] = if r == T::zero() { phase[k] } else { phase[k] * e / r };
    }
    if let Some(q) = q.as_mut() {
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] = q[i * n + j] * phase[j];
            }
        }
    }
    (diag, sub, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `sub[i]` couples
/// `i` and `i + 1`; `sub[n - 1]` is ignored. `z` (row-major, n x n) is
/// rotated in place when present.
fn tridiagonal_ql<T: Real>(d: &mut [T], sub: &[T], mut z: Option<&mut [T]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let mut e = sub.to_vec();
    e[n - 1] = T::zero();
    let cap = iteration_cap(n, n);
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut iterations = 0usize;
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > cap {
                    return Err(Error::NoConvergence {
                        what: "tridiagonal QL",
                        iterations: cap,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let h = z[k * n + i + 1];
                            z[k * n + i + 1] = s * z[k * n + i] + c * h;
                            z[k * n + i] = c * z[k * n + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

fn check_square_nonempty<T: Real>(h: &ComplexMatrix<T>) -> Result<()> {
    if h.is_empty() {
        return Err(Error::dim("empty matrix"));
    }
    if h.rows() != h.cols() {
        return Err(Error::dim(format!("{}x{} matrix is not square", h.rows(), h.cols())));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    check_square_nonempty(h)?;
    if h.rows() == 1 {
        return Ok(vec![h.get(0, 0).re]);
    }
    let (mut d, e, _) = tridiagonalize(h, false);
    tridiagonal_ql(&mut d, &e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// Full eigen-decomposition of a Hermitian matrix.
pub fn hermitian_eigen<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    check_square_nonempty(h)?;
    let n = h.rows();
    let (mut d, e, q) = tridiagonalize(h, true);
    let q = q.expect("vectors requested");
    let mut z: Vec<T> = (0..n * n)
        .map(|k| if k / n == k % n { T::one() } else { T::zero() })
        .collect();
    tridiagonal_ql(&mut d, &e, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, col| {
        let k = order[col];
        (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, r| acc + q[i * n + r] * z[r * n + k])
    });
    Ok(HermitianEigen { values, vectors })
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if m.is_empty() {
        return Err(Error::dim("spectral norm of an empty matrix"));
    }
    if m.max_abs2() == T::zero() {
        return Ok(T::zero());
    }
    let g = if m.rows() < m.cols() { m.outer_gram() } else { m.gram() };
    let vals = hermitian_eigenvalues(&g)?;
    Ok(vals.last().copied().unwrap_or_else(T::zero).max(T::zero()).sqrt())
}

/// Smallest and largest eigenvalues of `M^H M`, clamped to `[0, ||M||^2]`.
pub fn extremal_gram_eigs<T: Real>(m: &ComplexMatrix<T>) -> Result<(T, T)> {
    if m.is_empty() {
        return Err(Error::dim("Gram eigenvalues of an empty matrix"));
    }
    let vals = hermitian_eigenvalues(&m.gram())?;
    let hi = vals[vals.len() - 1].max(T::zero());
    let lo = vals[0].max(T::zero()).min(hi);
    Ok((lo, hi))
}

/// Largest `|lambda - 1|` over the spectrum of a Hermitian matrix, i.e.
/// `|| H - I ||_2`.
pub(crate) fn identity_deviation<T: Real>(h: &ComplexMatrix<T>) -> Result<T> {
    if h.rows() == 1 {
        return Ok((h.get(0, 0).re - T::one()).abs());
    }
    if h.rows() == 2 {
        // Closed form for 2x2 Hermitian blocks, the hot path of RIP scans.
        let (a, d) = (h.get(0, 0).re, h.get(1, 1).re);
        let b2 = abs2(h.get(0, 1));
        let mean = (a + d) * T::lit(0.5);
        let half = (a - d) * T::lit(0.5);
        let rad = (half * half + b2).sqrt();
        return Ok(((mean + rad) - T::one()).abs().max(((mean - rad) - T::one()).abs()));
    }
    let vals = hermitian_eigenvalues(h)?;
    Ok((vals[0] - T::one()).abs().max((vals[vals.len() - 1] - T::one()).abs()))
}
