use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SAMPLES: usize = 4097;

/// Named coefficient shapes on `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// `sum_k coeffs[k] x^k`
    Polynomial { coeffs: Vec<f64> },
    /// `scale exp(rate x)`
    Exponential { scale: f64, rate: f64 },
    /// `offset + amplitude sin(frequency pi x)`
    Sine { offset: f64, amplitude: f64, frequency: f64 },
}

/// A coefficient or forcing term: a constant or a named profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Constant(f64),
    Profile(Profile),
}

impl Default for Coefficient {
    fn default() -> Self {
        Coefficient::Constant(0.0)
    }
}

impl From<f64> for Coefficient {
    fn from(v: f64) -> Self {
        Coefficient::Constant(v)
    }
}

impl Coefficient {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Profile(Profile::Polynomial { coeffs }) => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            Coefficient::Profile(Profile::Exponential { scale, rate }) => scale * (rate * x).exp(),
            Coefficient::Profile(Profile::Sine { offset, amplitude, frequency }) => {
                offset + amplitude * (frequency * PI * x).sin()
            }
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Coefficient::Constant(c) => Some(*c),
            Coefficient::Profile(Profile::Polynomial { coeffs }) if coeffs.iter().skip(1).all(|&c| c == 0.0) => {
                Some(coeffs.first().copied().unwrap_or(0.0))
            }
            _ => None,
        }
    }

    /// `constant` or `analytic`; every profile is an entire function.
    pub fn smoothness(&self) -> &'static str {
        if self.constant().is_some() {
            "constant"
        } else {
            "analytic"
        }
    }

    fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        (0..SAMPLES).map(move |i| self.eval(i as f64 / (SAMPLES - 1) as f64))
    }

    /// `sup |c|` on a fine grid (exact for constants).
    pub fn sup_abs(&self) -> f64 {
        match self.constant() {
            Some(c) => c.abs(),
            None => self.samples().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn min_value(&self) -> f64 {
        match self.constant() {
            Some(c) => c,
            None => self.samples().fold(f64::INFINITY, f64::min),
        }
    }

    /// Total variation on `[0, 1]`, from the grid.
    pub fn total_variation(&self) -> f64 {
        if self.constant().is_some() {
            return 0.0;
        }
        let v: Vec<f64> = self.samples().collect();
        v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.samples().all(f64::is_finite) {
            Ok(())
        } else {
            Err(Error::arg(format!("{name} is not finite on (0, 1)")))
        }
    }
}

/// `-(mu u')' + beta_adv u' + rho_reac u = F` on `(0, 1)`, `u(0) = u(1) = 0`,
/// in the weak form `a(u, v) = int mu u' v' + beta_adv u' v + rho_reac u v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdrProblem {
    pub mu: Coefficient,
    #[serde(default, alias = "beta")]
    pub beta_adv: Coefficient,
    #[serde(default, alias = "rho")]
    pub rho_reac: Coefficient,
    pub forcing: Coefficient,
}

impl AdrProblem {
    /// Pure diffusion with constant coefficient and load.
    pub fn diffusion(mu: f64, forcing: f64) -> Self {
        Self {
            mu: mu.into(),
            beta_adv: 0.0.into(),
            rho_reac: 0.0.into(),
            forcing: forcing.into(),
        }
    }

    /// Checks finiteness and `inf mu > 0` on a fine grid.
    pub fn validate(&self) -> Result<()> {
        self.mu.validate("mu")?;
        self.beta_adv.validate("beta_adv")?;
        self.rho_reac.validate("rho_reac")?;
        self.forcing.validate("forcing")?;
        let lo = self.mu.min_value();
        if !(lo > 0.0) {
            return Err(Error::arg(format!("mu must be bounded below by a positive constant, min = {lo}")));
        }
        Ok(())
    }

    pub fn has_constant_coefficients(&self) -> bool {
        self.mu.constant().is_some() && self.beta_adv.constant().is_some() && self.rho_reac.constant().is_some()
    }

    /// Continuity constant `sup|mu| + sup|beta_adv|/pi + sup|rho_reac|/pi^2`
    /// (Poincare constant `1/pi`).
    pub fn continuity_bound(&self) -> f64 {
        self.mu.sup_abs() + self.beta_adv.sup_abs() / PI + self.rho_reac.sup_abs() / (PI * PI)
    }

    /// Coercivity constant `mu + min(0, rho_reac)/pi^2` for constant
    /// coefficients (the advection term is skew).
    pub fn coercivity_constant(&self) -> Option<f64> {
        match (self.mu.constant(), self.beta_adv.constant(), self.rho_reac.constant()) {
            (Some(mu), Some(_), Some(rho)) => Some(mu + rho.min(0.0) / (PI * PI)),
            _ => None,
        }
    }
}
