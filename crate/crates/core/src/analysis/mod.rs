//! Verification toolkit: restricted isometry constants (exact, Monte Carlo,
//! weighted), empirical-process suprema, a null space property heuristic,
//! sample-complexity calculators and Maurey weak coverings.

mod complexity;
mod empirical;
mod maurey;
mod nsp;
mod rip;

pub use complexity::{
    paper_constants, sample_complexity, ComplexityBound, ComplexityRegime, TheoremConstants,
};
pub use empirical::{empirical_process_sup, Covariance};
pub use maurey::{
    maurey_weak_cover, random_hull_targets, verify_weak_cover, CoverCheck, CoverParams, TargetCover, WeakCover,
};
pub use nsp::{nsp_lower_bound, NspEstimate};
pub use rip::{rip_exact, rip_monte_carlo, weighted_rip_exact, RipMethod, RipReport};
