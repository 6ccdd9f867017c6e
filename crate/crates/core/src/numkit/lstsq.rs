use num_complex::Complex;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{norm2, Real};

/// Least-squares solution of `M z ~ y`.
#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub solution: Vec<Complex<T>>,
    /// Numerical rank detected by the pivoted QR.
    pub rank: usize,
    /// Set when `M` lacks full column rank; `solution` is then the
    /// minimum-norm minimizer.
    pub rank_deficient: bool,
}

/// Householder reflectors `I - 2 v v^H` acting on trailing blocks.
struct Reflectors<T> {
    list: Vec<(usize, Vec<Complex<T>>)>,
}

impl<T: Real> Reflectors<T> {
    fn apply_adjoint(&self, b: &mut [Complex<T>]) {
        for (k, v) in &self.list {
            reflect(v, &mut b[*k..]);
        }
    }

    fn apply(&self, b: &mut [Complex<T>]) {
        for (k, v) in self.list.iter().rev() {
            reflect(v, &mut b[*k..]);
        }
    }
}

fn reflect<T: Real>(v: &[Complex<T>], x: &mut [Complex<T>]) {
    let s = crate::scalar::dot(v, x) * T::lit(2.0);
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi = *xi - vi * s;
    }
}

/// Pivoted (optionally) Householder QR on column storage. Columns are
/// overwritten by `R` in their leading `min(m, n)` rows.
fn householder_qr<T: Real>(
    cols: &mut [Vec<Complex<T>>],
    rows: usize,
    pivot: bool,
) -> (Vec<usize>, Reflectors<T>) {
    let n = cols.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut list = Vec::new();
    for k in 0..rows.min(n) {
        if pivot {
            let best = (k..n)
                .map(|j| (j, norm2(&cols[j][k..])))
                .fold((k, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
            cols.swap(k, best.0);
            perm.swap(k, best.0);
        }
        let x = &cols[k][k..];
        let xnorm = norm2(x);
        if xnorm == T::zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex<T>> = x.to_vec();
        v[0] = v[0] - alpha;
        let vn = norm2(&v);
        if vn == T::zero() {
            continue;
        }
        v.iter_mut().for_each(|z| *z = *z / vn);
        for col in cols.iter_mut().skip(k) {
            reflect(&v, &mut col[k..]);
        }
        // Exact zeros below the diagonal.
        cols[k][k] = alpha;
        for z in cols[k][k + 1..].iter_mut() {
            *z = Complex::new(T::zero(), T::zero());
        }
        list.push((k, v));
    }
    (perm, Reflectors { list })
}

/// Minimizer of `||M z - y||_2` via pivoted Householder QR.
///
/// Rank-deficient systems return the minimum-norm minimizer with
/// `rank_deficient` set.
pub fn least_squares<T: Real>(m: &ComplexMatrix<T>, y: &[Complex<T>]) -> Result<LeastSquares<T>> {
    let (rows, n) = m.shape();
    if rows != y.len() {
        return Err(Error::dim(format!("matrix has {rows} rows, right-hand side has {}", y.len())));
    }
    if n == 0 {
        return Ok(LeastSquares { solution: Vec::new(), rank: 0, rank_deficient: false });
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| m.column(j)).collect();
    let (perm, refl) = householder_qr(&mut cols, rows, true);
    let mut qb = y.to_vec();
    refl.apply_adjoint(&mut qb);

    let kmax = rows.min(n);
    let r00 = if kmax > 0 { cols[0][0].norm() } else { T::zero() };
    let rtol = T::epsilon() * T::from_count(rows.max(n)) * T::lit(10.0) * r00;
    let rank = (0..kmax).take_while(|&k| r00 > T::zero() && cols[k][k].norm() > rtol).count();

    let mut z = vec![zero; n];
    if rank == n {
        for k in (0..n).rev() {
            let mut s = qb[k];
            for j in k + 1..n {
                s = s - cols[j][k] * z[j];
            }
            z[k] = s / cols[k][k];
        }
    } else if rank > 0 {
        // Minimum-norm solution of the trapezoidal system R1 z = c with
        // R1 = R[0..rank, 0..n]: factor R1^H = Q2 R2, then z = Q2 R2^{-H} c.
        let mut r1h: Vec<Vec<Complex<T>>> = (0..rank)
            .map(|i| (0..n).map(|j| if j >= i { cols[j][i].conj() } else { zero }).collect())
            .collect();
        let (_, refl2) = householder_qr(&mut r1h, n, false);
        let mut u = vec![zero; n];
        for i in 0..rank {
            // Row i of R2^H is column i of R2, conjugated.
            let mut s = qb[i];
            for j in 0..i {
                s = s - r1h[i][j].conj() * u[j];
            }
            u[i] = s / r1h[i][i].conj();
        }
        refl2.apply(&mut u);
        z = u;
    }
    let mut solution = vec![zero; n];
    for (k, &p) in perm.iter().enumerate() {
        solution[p] = z[k];
    }
    Ok(LeastSquares { solution, rank, rank_deficient: rank < n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn identity_returns_rhs() {
        let y = vec![Complex::new(1.0, 2.0), c(-3.0), Complex::new(0.0, 0.5)];
        let ls = least_squares(&ComplexMatrix::identity(3), &y).unwrap();
        for (a, b) in ls.solution.iter().zip(&y) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(!ls.rank_deficient);
    }

    #[test]
    fn projection_onto_ones() {
        let m = ComplexMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        let ls = least_squares(&m, &[c(1.0), c(0.0)]).unwrap();
        assert!((ls.solution[0] - c(0.5)).norm() < 1e-14);
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // Two identical columns: minimum-norm split is even.
        let m = ComplexMatrix::from_real(3, 2, &[1.0, 1.0, 2.0, 2.0, 0.0, 0.0]).unwrap();
        let ls = least_squares(&m, &[c(1.0), c(2.0), c(0.0)]).unwrap();
        assert!(ls.rank_deficient);
        assert_eq!(ls.rank, 1);
        assert!((ls.solution[0] - c(0.5)).norm() < 1e-12);
        assert!((ls.solution[1] - c(0.5)).norm() < 1e-12);
    }

    #[test]
    fn underdetermined_minimum_norm() {
        let m = ComplexMatrix::from_real(1, 2, &[1.0, 1.0]).unwrap();
        let ls = least_squares(&m, &[c(2.0)]).unwrap();
        assert!(ls.rank_deficient);
        assert!((ls.solution[0] - c(1.0)).norm() < 1e-12);
        assert!((ls.solution[1] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let ls = least_squares(&ComplexMatrix::<f64>::zeros(2, 2), &[c(1.0), c(1.0)]).unwrap();
        assert_eq!(ls.rank, 0);
        assert!(ls.solution.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn length_mismatch() {
        assert!(least_squares(&ComplexMatrix::<f64>::identity(2), &[c(1.0)]).is_err());
    }
}
