use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{abs2, Real};

/// Dense complex matrix in row-major order.
///
/// Values are immutable once built; every operation returns a new matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows.saturating_mul(cols),
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::arg(format!(
                "non-finite entry at ({}, {})",
                k / cols.max(1),
                k % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// Real diagonal matrix.
    pub fn diag(d: &[T]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| {
            Complex::new(if i == j { d[i] } else { T::zero() }, T::zero())
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Embeds a real row-major matrix.
    pub fn from_real(rows: usize, cols: usize, data: &[T]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
    }

    /// Stacks rows of equal length.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("rows of unequal length"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn column_norm(&self, j: usize) -> T {
        crate::scalar::norm2(&self.column(j))
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, k| self.get(i, idx[k]))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |k, j| self.get(idx[k], j))
    }

    /// Principal submatrix on an index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    /// `self * diag(d)`.
    pub fn scale_columns(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.cols, "column scaling length");
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * d[j])
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.rows, "row scaling length");
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * d[i])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(other.row(k)) {
                    *d = *d + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.cols {
            return Err(Error::dim(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// `self^H * y`.
    pub fn adjoint_matvec(&self, y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if y.len() != self.rows {
            return Err(Error::dim(format!(
                "matrix has {} rows, vector has {} entries",
                self.rows,
                y.len()
            )));
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.cols];
        for (i, yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a.conj() * yi;
            }
        }
        Ok(out)
    }

    /// Gram matrix `self^H self`, exactly Hermitian.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for i in 0..self.rows {
                    acc = acc + self.get(i, a).conj() * self.get(i, b);
                }
                if a == b {
                    acc.im = T::zero();
                }
                g.data[a * n + b] = acc;
                g.data[b * n + a] = acc.conj();
            }
        }
        g
    }

    /// `self self^H`.
    pub fn outer_gram(&self) -> Self {
        self.adjoint().gram()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dim("shape mismatch in subtraction"));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn frobenius(&self) -> T {
        crate::scalar::norm2(&self.data)
    }

    pub fn max_abs2(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &z| m.max(abs2(z)))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Converts the scalar type through `f64`.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        assert!(ComplexMatrix::<f64>::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn gram_is_hermitian_and_matches_product() {
        let a = ComplexMatrix::from_fn(3, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5 * i as f64));
        let g = a.gram();
        let p = a.adjoint().matmul(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.get(i, j) - p.get(i, j)).norm() < 1e-12);
                assert_eq!(g.get(i, j), g.get(j, i).conj());
            }
        }
    }

    #[test]
    fn adjoint_matvec_agrees_with_explicit_adjoint() {
        let a = ComplexMatrix::from_fn(3, 4, |i, j| c((i * j) as f64, i as f64 - j as f64));
        let y = vec![c(1.0, 2.0), c(-1.0, 0.5), c(0.0, 1.0)];
        let lhs = a.adjoint_matvec(&y).unwrap();
        let rhs = a.adjoint().matvec(&y).unwrap();
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-12);
        }
    }
}
