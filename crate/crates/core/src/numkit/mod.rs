//! Dense complex linear algebra and reproducible random streams.

mod combin;
mod eigen;
mod interchange;
mod lstsq;
mod matrix;
mod quadrature;
mod rng;

pub use combin::{binomial, check_enumeration, Combinations, ENUMERATION_CAP};
pub(crate) use eigen::identity_deviation;
pub use eigen::{extremal_gram_eigs, hermitian_eigen, hermitian_eigenvalues, spectral_norm, HermitianEigen};
pub use interchange::{read_matrix_csv, write_matrix_csv, parse_matrix_csv, format_matrix_csv};
pub use lstsq::{least_squares, LeastSquares};
pub use matrix::ComplexMatrix;
pub use quadrature::GaussLegendre;
pub use rng::{derive_seed, RandomStream};

/// Iteration cap shared by the iterative eigen kernels.
pub fn iteration_cap(rows: usize, cols: usize) -> usize {
    10 * rows.max(cols) + 500
}
