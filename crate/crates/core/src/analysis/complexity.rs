use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Explicit constants of the sampling theorems and the OMP recovery result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremConstants {
    pub kappa: f64,
    pub c0: f64,
    pub c1: f64,
    #[serde(rename = "K_bar")]
    pub k_bar: usize,
    #[serde(rename = "C_omp")]
    pub c_omp: f64,
    pub eps_star_normalized: f64,
    pub eps_star: f64,
    pub kappa_cond_limit: f64,
    /// Exponent denominator in the CORSING failure probability.
    pub corsing_failure_denominator: f64,
}

pub fn paper_constants() -> TheoremConstants {
    let r2 = std::f64::consts::SQRT_2;
    let eps_star = 1.0 / 13.0;
    TheoremConstants {
        kappa: (10.0 - 7.0 * r2) / 28.0,
        c0: 1600.0 * (99.0 + 70.0 * r2),
        c1: 492.0,
        k_bar: 12,
        c_omp: 49.0,
        eps_star_normalized: 1.0 / 6.0,
        eps_star,
        kappa_cond_limit: 1.0 / (1.0 - eps_star),
        corsing_failure_denominator: 5f64.powi(12),
    }
}

/// Which sampling theorem to evaluate, with its inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum ComplexityRegime {
    /// Bounded-coordinate vectors on `sqrt(s) B_1`.
    Main { k: f64, s: usize, n: usize, delta: f64 },
    /// RIP for Riesz systems.
    RieszRip {
        k_psi: f64,
        c_lower: f64,
        c_upper: f64,
        s: usize,
        n: usize,
        epsilon: f64,
    },
    /// RIP for finite Riesz matrices sampled by local coherence.
    CoherenceRip {
        nu_l1: f64,
        c_lower: f64,
        c_upper: f64,
        s: usize,
        n: usize,
        epsilon: f64,
    },
    /// RIP of the rescaled CORSING matrix.
    CorsingRip {
        nu_l1: f64,
        c_phi: f64,
        c_xi: f64,
        beta: f64,
        kappa: f64,
        gamma: f64,
        s: usize,
        n: usize,
        epsilon: f64,
    },
    /// Weighted `l1` ball with `w_j >= K_j`.
    Weighted { s: usize, n: usize, delta: f64 },
}

impl ComplexityRegime {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Main { .. } => "main",
            Self::RieszRip { .. } => "riesz_rip",
            Self::CoherenceRip { .. } => "coherence_rip",
            Self::CorsingRip { .. } => "corsing_rip",
            Self::Weighted { .. } => "weighted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityBound {
    pub inputs: ComplexityRegime,
    /// Open interval the accuracy parameter must lie in.
    pub admissible_interval: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eta: Option<f64>,
    pub m_required: f64,
    /// Failure probability is `2 exp(-rate * m)`.
    pub rate: f64,
    /// Failure probability at `m = ceil(m_required)`.
    pub failure_probability: f64,
    pub failure_probability_expr: String,
    pub c0: f64,
    pub c1: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl ComplexityBound {
    pub fn failure_at(&self, m: f64) -> f64 {
        (2.0 * (-self.rate * m).exp()).min(1.0)
    }
}

fn check_open(parameter: &'static str, value: f64, lo: f64, hi: f64, source: &str) -> Result<()> {
    if value > lo && value < hi {
        Ok(())
    } else {
        Err(Error::Range {
            parameter,
            value,
            interval: format!("({lo}, {hi}) [{source}]"),
        })
    }
}

fn check_positive(parameter: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Range {
            parameter,
            value,
            interval: "(0, inf)".into(),
        })
    }
}

fn check_dims(s: usize, n: usize) -> Result<()> {
    if s == 0 || n == 0 {
        return Err(Error::arg("s and N must be positive"));
    }
    Ok(())
}

/// Evaluates the displayed sample-complexity bound of the chosen theorem.
/// Logarithms are natural. The unspecified failure-rate constant of the
/// Riesz and coherence theorems is taken as 1.
pub fn sample_complexity(regime: &ComplexityRegime) -> Result<ComplexityBound> {
    let pc = paper_constants();
    let c0 = pc.c0;
    let e = std::f64::consts::E;
    let ln_en = |n: usize| (e * n as f64).ln();
    let (interval, eta, m, rate, expr, c1, note) = match *regime {
        ComplexityRegime::Main { k, s, n, delta } => {
            check_dims(s, n)?;
            check_positive("K", k)?;
            check_open("delta", delta, 0.0, pc.kappa, "delta in (0, kappa)")?;
            let sk2 = s as f64 * k * k;
            let m = c0 * sk2 / (delta * delta) * ln_en(n) * (sk2 / delta).ln().powi(2);
            let rate = delta * delta / sk2;
            ((0.0, pc.kappa), None, m, rate, "2 exp(-delta^2 m / (s K^2))".to_string(), pc.c1, None)
        }
        ComplexityRegime::Weighted { s, n, delta } => {
            check_dims(s, n)?;
            check_open("delta", delta, 0.0, pc.kappa, "delta in (0, kappa)")?;
            let sf = s as f64;
            let m = c0 * sf / (delta * delta) * ln_en(n) * (sf / delta).ln().powi(2);
            ((0.0, pc.kappa), None, m, delta * delta / sf, "2 exp(-delta^2 m / s)".to_string(), pc.c1, None)
        }
        ComplexityRegime::RieszRip { k_psi, c_lower, c_upper, s, n, epsilon } => {
            check_dims(s, n)?;
            check_positive("K_psi", k_psi)?;
            check_positive("c_psi", c_lower)?;
            check_positive("C_psi", c_upper)?;
            let lo = 1.0 - c_lower / c_upper;
            check_open("epsilon", epsilon, lo, 1.0, "epsilon in (1 - c_psi/C_psi, 1)")?;
            let eta = epsilon - lo;
            let big = (c_upper.powi(-2)).max(1.0);
            let inner = s as f64 * k_psi * k_psi * big / (eta * eta);
            let m = c0 * inner * inner.ln().powi(2) * ln_en(n);
            let rate = c_upper.powi(2).min(1.0) * eta * eta / (k_psi * k_psi * s as f64);
            (
                (lo, 1.0),
                Some(eta),
                m,
                rate,
                "2 exp(-c1 min(C_psi^2, 1) eta^2 m / (K_psi^2 s)), c1 = 1".to_string(),
                1.0,
                None,
            )
        }
        ComplexityRegime::CoherenceRip { nu_l1, c_lower, c_upper, s, n, epsilon } => {
            check_dims(s, n)?;
            check_positive("||nu||_1", nu_l1)?;
            check_positive("c_B", c_lower)?;
            check_positive("C_B", c_upper)?;
            let lo = 1.0 - c_lower / c_upper;
            check_open("epsilon", epsilon, lo, 1.0, "epsilon in (1 - c_B/C_B, 1)")?;
            let eta = epsilon - lo;
            let big = (c_upper.powi(-2)).max(1.0);
            let inner = s as f64 * nu_l1 * big / (eta * eta);
            let m = c0 * inner * inner.ln().powi(2) * ln_en(n);
            let rate = c_upper.powi(2).min(1.0) * eta * eta / (nu_l1 * s as f64);
            (
                (lo, 1.0),
                Some(eta),
                m,
                rate,
                "2 exp(-c1 min(C_B^2, 1) eta^2 m / (||nu||_1 s)), c1 = 1".to_string(),
                1.0,
                None,
            )
        }
        ComplexityRegime::CorsingRip { nu_l1, c_phi, c_xi, beta, kappa, gamma, s, n, epsilon } => {
            check_dims(s, n)?;
            check_positive("||nu||_1", nu_l1)?;
            check_positive("C_phi", c_phi)?;
            check_positive("C_xi", c_xi)?;
            check_positive("beta", beta)?;
            check_positive("kappa", kappa)?;
            check_open("gamma", gamma, 0.0, 1.0, "gamma in (0, 1)")?;
            let lo = 1.0 - (1.0 - gamma) / kappa;
            check_open("epsilon", epsilon, lo, 1.0, "epsilon in (1 - (1 - gamma)/kappa, 1)")?;
            let eta = epsilon - lo;
            let small = (c_phi * c_phi * c_xi * c_xi * beta.powi(4)).min(1.0);
            let inner = s as f64 * nu_l1 * nu_l1 / (small * eta * eta);
            let m = c0 * inner * ln_en(n) * inner.ln().powi(2);
            let rate = small * eta * eta / (pc.corsing_failure_denominator * s as f64 * nu_l1 * nu_l1);
            let note = if lo >= pc.eps_star {
                Some(format!(
                    "no epsilon below eps* = 1/13 is admissible: kappa = {kappa} must be < (1 - gamma)/(1 - eps*) = {}",
                    (1.0 - gamma) / (1.0 - pc.eps_star)
                ))
            } else {
                None
            };
            (
                (lo, 1.0),
                Some(eta),
                m,
                rate,
                "2 exp(-min(1, C_phi^2 C_xi^2 beta^4) eta^2 m / (5^12 s ||nu||_1^2))".to_string(),
                1.0,
                note,
            )
        }
    };
    let failure_probability = (2.0 * (-rate * m.ceil()).exp()).min(1.0);
    Ok(ComplexityBound {
        inputs: regime.clone(),
        admissible_interval: interval,
        eta,
        m_required: m,
        rate,
        failure_probability,
        failure_probability_expr: expr,
        c0,
        c1,
        note,
    })
}
