pub mod constants;
pub mod corsing;
pub mod cover;
pub mod recover;
pub mod rip;
pub mod sweep;

use clap::ValueEnum;
use corsing_core::numkit::RandomStream;
use corsing_core::systems::{
    fourier_system, hat_hierarchical_system, sample_riesz_matrix, sine_h10_system, MeasurementEnsemble,
};
use serde::{Deserialize, Serialize};

use crate::report::Failure;

/// Built-in bounded orthonormal systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Fourier,
    Sine,
    Hat,
}

/// `m x N` matrix sampled from a built-in system on stream `(seed, 0)`.
pub fn system_ensemble(kind: SystemKind, n: usize, m: usize, seed: u64) -> Result<MeasurementEnsemble, Failure> {
    let mut rng = RandomStream::new(seed, 0);
    let ens = match kind {
        SystemKind::Fourier => sample_riesz_matrix(&fourier_system(n)?, m, &mut rng)?,
        SystemKind::Sine => sample_riesz_matrix(&sine_h10_system(n)?, m, &mut rng)?,
        SystemKind::Hat => {
            let levels = (n + 1).trailing_zeros();
            if n + 1 != 1 << levels {
                return Err(Failure::config(format!("hat system needs N = 2^L - 1, got {n}")));
            }
            sample_riesz_matrix(&hat_hierarchical_system(levels)?, m, &mut rng)?
        }
    };
    Ok(ens)
}

/// Parses `a,b,c` into a list.
pub fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}
