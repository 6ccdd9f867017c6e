//! Sparse recovery: orthogonal matching pursuit with column normalization,
//! quadratically constrained (weighted) basis pursuit, and best `s`-term
//! approximation.

mod bp;
mod omp;
mod sparse;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use bp::{basis_pursuit, basis_pursuit_with, weighted_basis_pursuit, BpOptions};
pub use omp::omp;
pub use sparse::{best_s_term, weighted_norms, SparseSignal, WeightVector};

use crate::scalar::Real;

/// Result of a recovery run.
#[derive(Clone, Debug)]
pub struct RecoveryOutcome<T> {
    pub estimate: Vec<Complex<T>>,
    /// Indices of nonzero estimate entries (ascending).
    pub support: Vec<usize>,
    /// `||A estimate - y||_2`, recomputed from the returned estimate.
    pub residual_l2: T,
    pub iterations: usize,
    /// `||estimate||_1`, or the weighted `l1` norm for weighted programs.
    pub objective: T,
    pub converged: bool,
    /// Set when zero columns were excluded or a least-squares subproblem
    /// was rank deficient.
    pub degenerate: bool,
    /// OMP selection order.
    pub selection_path: Vec<usize>,
    /// OMP residual norm after each iteration.
    pub residual_history: Vec<T>,
    /// Certified primal-dual gap for basis pursuit.
    pub duality_gap: Option<T>,
}

impl<T: Real> RecoveryOutcome<T> {
    pub fn record(&self) -> OutcomeRecord {
        OutcomeRecord {
            estimate_re: self.estimate.iter().map(|z| z.re.to_f64_lossy()).collect(),
            estimate_im: self.estimate.iter().map(|z| z.im.to_f64_lossy()).collect(),
            support: self.support.clone(),
            residual_l2: self.residual_l2.to_f64_lossy(),
            iterations: self.iterations,
            objective: self.objective.to_f64_lossy(),
            converged: self.converged,
        }
    }
}

/// JSON form of a [`RecoveryOutcome`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub estimate_re: Vec<f64>,
    pub estimate_im: Vec<f64>,
    pub support: Vec<usize>,
    pub residual_l2: f64,
    pub iterations: usize,
    pub objective: f64,
    pub converged: bool,
}

pub(crate) fn support_of<T: Real>(x: &[Complex<T>]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, z)| z.re != T::zero() || z.im != T::zero())
        .map(|(i, _)| i)
        .collect()
}
