//! Compressed Petrov-Galerkin (CORSING) solver for 1D
//! advection-diffusion-reaction problems with `H^1_0`-orthonormal trial
//! bases and a sine test basis.

mod assembly;
mod problem;
mod solve;

pub use assembly::{
    assemble_full, coherence_scan, coherence_scan_range, coherence_tail_bound, local_a_coherence,
    PetrovGalerkinSetup, SetupRecord,
};
pub use problem::{AdrProblem, Coefficient, Profile};
pub use solve::{
    choose_truncation, condition_number_kappa, corsing_rip_inputs, corsing_solve, h1_error, h1_norm,
    omp_error_constant, truncate_norm, CorsingConfig, CorsingDiagnostics, CorsingPlan, CorsingRipInputs,
    CorsingSolution, SolutionRecord, Truncation, KAPPA_LIMIT, K_BAR,
};
