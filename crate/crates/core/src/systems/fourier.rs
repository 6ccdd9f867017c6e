use std::f64::consts::PI;

use super::FunctionSystem;
use crate::error::{Error, Result};
use crate::C64;

/// `psi_j(omega) = exp(2 pi i j omega)` on `[0, 1)` with the uniform measure.
#[derive(Clone, Debug)]
pub struct FourierSystem {
    n: usize,
}

pub fn fourier_system(n: usize) -> Result<FourierSystem> {
    if n == 0 {
        return Err(Error::dim("Fourier system needs N >= 1"));
    }
    Ok(FourierSystem { n })
}

impl FunctionSystem for FourierSystem {
    fn len(&self) -> usize {
        self.n
    }

    fn evaluate(&self, j: usize, omega: f64) -> C64 {
        // Reduce j*omega mod 1 first so large frequencies keep full accuracy.
        let t = (j as f64 * omega).fract();
        C64::from_polar(1.0, 2.0 * PI * t)
    }

    fn sup_bound(&self) -> f64 {
        1.0
    }

    fn riesz_bounds(&self) -> (f64, f64) {
        (1.0, 1.0)
    }

    fn name(&self) -> &'static str {
        "fourier"
    }
}
