//! Bounded Riesz function systems and the two random-matrix constructions
//! built from them: continuous sampling at random points and
//! coherence-weighted sampling of the rows of a finite matrix.

mod fourier;
mod h10;
mod sampling;

use serde::{Deserialize, Serialize};

pub use fourier::{fourier_system, FourierSystem};
pub use h10::{hat_hierarchical_system, sine_h10_system, H10Basis, HatSystem, SineSystem};
pub use sampling::{
    coherence_sampler, empirical_energy, local_coherence, sample_riesz_matrix, sparse_eigen_bounds,
    CoherenceProfile,
};

use crate::numkit::{ComplexMatrix, RandomStream};
use crate::C64;

/// A finite family `(psi_j)` on a probability space `(S, mu)` with uniform
/// bound `K_psi` and Riesz constants `c_psi <= C_psi`.
pub trait FunctionSystem: Send + Sync {
    /// Number of functions `N`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `psi_j(omega)`.
    fn evaluate(&self, j: usize, omega: f64) -> C64;

    /// `K_psi >= max_j ||psi_j||_inf`.
    fn sup_bound(&self) -> f64;

    /// `(c_psi, C_psi)`.
    fn riesz_bounds(&self) -> (f64, f64);

    /// Draws `omega ~ mu`.
    fn sample_point(&self, rng: &mut RandomStream) -> f64 {
        rng.uniform()
    }

    fn name(&self) -> &'static str;
}

/// Where the rows of an ensemble came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Draws {
    /// Sample points `omega_i` of a continuous system.
    Points(Vec<f64>),
    /// Row indices of a finite matrix.
    Rows(Vec<usize>),
}

impl Draws {
    pub fn len(&self) -> usize {
        match self {
            Draws::Points(p) => p.len(),
            Draws::Rows(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sampled `m x N` matrix together with everything needed to replay it.
#[derive(Clone, Debug)]
pub struct MeasurementEnsemble {
    pub matrix: ComplexMatrix<f64>,
    /// Global factor `1 / sqrt(m C)` applied to every row.
    pub scaling: f64,
    pub draws: Draws,
    /// Row-selection density for discrete draws.
    pub probabilities: Option<Vec<f64>>,
    pub seed: u64,
    pub stream_id: u64,
}

impl MeasurementEnsemble {
    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    /// The unscaled sample vectors `X_i` as rows (the matrix divided by
    /// `scaling`).
    pub fn sample_rows(&self) -> Vec<Vec<C64>> {
        (0..self.m())
            .map(|i| self.matrix.row(i).iter().map(|z| z / self.scaling).collect())
            .collect()
    }

    /// JSON record; the matrix itself lives in the CSV at `matrix_ref`.
    pub fn record(&self, matrix_ref: impl Into<String>) -> EnsembleRecord {
        EnsembleRecord {
            m: self.m(),
            n: self.n(),
            scaling: self.scaling,
            seed: self.seed,
            stream_id: self.stream_id,
            draws: self.draws.clone(),
            probabilities: self.probabilities.clone(),
            matrix_ref: matrix_ref.into(),
        }
    }
}

/// Serialized form of a [`MeasurementEnsemble`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRecord {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub scaling: f64,
    pub seed: u64,
    pub stream_id: u64,
    pub draws: Draws,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub probabilities: Option<Vec<f64>>,
    pub matrix_ref: String,
}
