use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Support/value representation of a vector in `C^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSignal<T> {
    n: usize,
    entries: Vec<(usize, Complex<T>)>,
}

impl<T: Real> SparseSignal<T> {
    /// Sorts by index, drops zeros, rejects duplicates and out-of-range
    /// indices.
    pub fn new(n: usize, mut entries: Vec<(usize, Complex<T>)>) -> Result<Self> {
        entries.retain(|(_, z)| z.re != T::zero() || z.im != T::zero());
        entries.sort_by_key(|(i, _)| *i);
        if let Some((i, _)) = entries.iter().find(|(i, _)| *i >= n) {
            return Err(Error::dim(format!("index {i} outside 0..{n}")));
        }
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::arg("duplicate index in sparse signal"));
        }
        Ok(Self { n, entries })
    }

    pub fn from_dense(x: &[Complex<T>]) -> Self {
        Self {
            n: x.len(),
            entries: x
                .iter()
                .enumerate()
                .filter(|(_, z)| z.re != T::zero() || z.im != T::zero())
                .map(|(i, z)| (i, *z))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, Complex<T>)] {
        &self.entries
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|(i, _)| *i).collect()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> Vec<Complex<T>> {
        let mut x = vec![Complex::new(T::zero(), T::zero()); self.n];
        for &(i, z) in &self.entries {
            x[i] = z;
        }
        x
    }
}

/// Weights `w_j >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector<T> {
    w: Vec<T>,
}

impl<T: Real> WeightVector<T> {
    pub fn new(w: Vec<T>) -> Result<Self> {
        if let Some(j) = w.iter().position(|&v| !(v >= T::one() && v.is_finite())) {
            return Err(Error::arg(format!("weight w[{j}] = {} is below 1", w[j])));
        }
        Ok(Self { w })
    }

    pub fn ones(n: usize) -> Self {
        Self { w: vec![T::one(); n] }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Keeps the `s` largest-magnitude entries; ties go to the lower index.
pub fn best_s_term<T: Real>(x: &[Complex<T>], s: usize) -> Result<SparseSignal<T>> {
    if s > x.len() {
        return Err(Error::arg(format!("s = {s} exceeds N = {}", x.len())));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        x[b].norm()
            .partial_cmp(&x[a].norm())
            .expect("finite entries")
            .then(a.cmp(&b))
    });
    let entries = order[..s].iter().map(|&i| (i, x[i])).collect();
    SparseSignal::new(x.len(), entries)
}

/// `(sum w_j |x_j|, sum_{x_j != 0} w_j^2)`.
pub fn weighted_norms<T: Real>(x: &[Complex<T>], w: &WeightVector<T>) -> Result<(T, T)> {
    if x.len() != w.len() {
        return Err(Error::dim(format!("{} entries vs {} weights", x.len(), w.len())));
    }
    let mut l1 = T::zero();
    let mut l0 = T::zero();
    for (z, &wj) in x.iter().zip(w.as_slice()) {
        l1 += wj * z.norm();
        if z.re != T::zero() || z.im != T::zero() {
            l0 += wj * wj;
        }
    }
    Ok((l1, l0))
}
