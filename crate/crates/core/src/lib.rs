//! Sparse recovery from subsampled bounded Riesz systems, the compressed
//! Petrov-Galerkin (CORSING) solver for 1D advection-diffusion-reaction
//! problems, and a verification toolkit for restricted isometry constants,
//! null space properties and Maurey weak coverings.
//!
//! The dense linear algebra, the recovery algorithms and the RIP tooling are
//! generic over the real scalar type (`f32`/`f64`) through [`Real`]; the
//! function systems, quadrature and PDE assembly work in `f64`.

pub mod analysis;
pub mod corsing;
pub mod error;
pub mod numkit;
pub mod recovery;
pub mod scalar;
pub mod systems;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
/// Single-precision complex scalar.
pub type C32 = Complex<f32>;
/// Double-precision complex dense matrix, the default carrier.
pub type Matrix = numkit::ComplexMatrix<f64>;
/// Single-precision complex dense matrix.
pub type Matrix32 = numkit::ComplexMatrix<f32>;
/// Double-precision recovery outcome.
pub type Outcome = recovery::RecoveryOutcome<f64>;



/// Double-precision RIP report.
pub type Rip = analysis::RipReport<f64>;
