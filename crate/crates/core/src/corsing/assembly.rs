use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::AdrProblem;
use crate::error::{Error, Result};
use crate::numkit::{extremal_gram_eigs, ComplexMatrix, GaussLegendre};
use crate::systems::{sine_h10_system, CoherenceProfile, H10Basis, SineSystem};
use crate::C64;

const GAUSS_POINTS: usize = 16;
const BASE_PANELS: usize = 512;
/// Test-basis size used to estimate the inf-sup constant of variable
/// coefficient problems.
const INF_SUP_TESTS: usize = 256;

/// Trial basis, sine test basis, and the constants of the weak problem.
#[derive(Clone, Debug, PartialEq)]
pub struct PetrovGalerkinSetup {
    pub trial: H10Basis,
    /// Largest admissible test-basis size.
    pub test_cap: usize,
    pub c_phi: f64,
    pub upper_phi: f64,
    pub c_xi: f64,
    pub upper_xi: f64,
    /// Inf-sup constant.
    pub alpha: f64,
    /// Continuity constant.
    pub beta: f64,
    /// How `alpha` was obtained: `coercivity` or `discrete_inf_sup`.
    pub alpha_source: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetupRecord {
    pub trial: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub test_cap: usize,
    pub c_phi: f64,
    #[serde(rename = "C_phi")]
    pub upper_phi: f64,
    pub c_xi: f64,
    #[serde(rename = "C_xi")]
    pub upper_xi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_source: String,
}

impl PetrovGalerkinSetup {
    /// Both bases are `H^1_0`-orthonormal, so all Riesz constants are 1.
    /// `alpha` is the coercivity constant for constant coefficients and the
    /// discrete inf-sup constant on the trial space otherwise; `beta` is the
    /// continuity bound of the problem.
    pub fn new(trial: H10Basis, test_cap: usize, problem: &AdrProblem) -> Result<Self> {
        problem.validate()?;
        if test_cap == 0 {
            return Err(Error::arg("test cap must be positive"));
        }
        let beta = problem.continuity_bound();
        let mut setup = Self {
            trial,
            test_cap,
            c_phi: 1.0,
            upper_phi: 1.0,
            c_xi: 1.0,
            upper_xi: 1.0,
            alpha: 0.0,
            beta,
            alpha_source: "coercivity",
        };
        match problem.coercivity_constant() {
            Some(a) if a > 0.0 => setup.alpha = a,
            Some(_) | None => {
                let n = setup.trial.len();
                let tests = INF_SUP_TESTS.max(2 * n).min(test_cap.max(n));
                let (b, _) = assemble_full(&setup, problem, n, tests)?;
                let (lo, _) = extremal_gram_eigs(&b)?;
                setup.alpha = lo.sqrt();
                setup.alpha_source = "discrete_inf_sup";
            }
        }
        if !(setup.alpha > 0.0) {
            return Err(Error::arg("weak form is not inf-sup stable on this trial space (alpha = 0)"));
        }
        setup.beta = setup.beta.max(setup.alpha);
        Ok(setup)
    }

    pub fn with_constants(mut self, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= beta && beta.is_finite()) {
            return Err(Error::arg(format!("need 0 < alpha <= beta, got alpha = {alpha}, beta = {beta}")));
        }
        self.alpha = alpha;
        self.beta = beta;
        Ok(self)
    }

    pub fn n_max(&self) -> usize {
        self.trial.len()
    }

    pub fn record(&self) -> SetupRecord {
        SetupRecord {
            trial: self.trial.kind().into(),
            n: self.trial.len(),
            test_cap: self.test_cap,
            c_phi: self.c_phi,
            upper_phi: self.upper_phi,
            c_xi: self.c_xi,
            upper_xi: self.upper_xi,
            alpha: self.alpha,
            beta: self.beta,
            alpha_source: self.alpha_source.into(),
        }
    }
}

fn test_basis(cap: usize) -> SineSystem {
    sine_h10_system(cap.max(1)).expect("cap >= 1")
}

/// Composite Gauss-Legendre on `[a, b]` with a panel-doubling check.
fn checked_integral(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    freq: usize,
    f: impl Fn(f64) -> f64,
    q: usize,
    j: usize,
) -> Result<f64> {
    let panels = BASE_PANELS.max((2.0 * freq as f64 * (b - a)).ceil() as usize);
    let coarse = rule.integrate(a, b, panels, &f);
    let fine = rule.integrate(a, b, 2 * panels, &f);
    let change = (fine - coarse).abs();
    if change > 1e-11 + 1e-9 * fine.abs() {
        return Err(Error::Quadrature { q, j, change });
    }
    Ok(fine)
}

/// `a(phi_j, xi_q)` for trial `j` and test index `q` (frequency `q + 1`).
fn entry(
    trial: &H10Basis,
    problem: &AdrProblem,
    rule: &GaussLegendre,
    test: &SineSystem,
    j: usize,
    q: usize,
) -> Result<f64> {
    let p = q + 1;
    if problem.has_constant_coefficients() {
        let mu = problem.mu.constant().unwrap_or(0.0);
        let beta = problem.beta_adv.constant().unwrap_or(0.0);
        let rho = problem.rho_reac.constant().unwrap_or(0.0);
        let pr = trial.pair_with_sine(j, p);
        return Ok(mu * pr.stiffness + beta * pr.advection + rho * pr.mass);
    }
    let mut total = 0.0;
    for (a, b) in trial.smooth_pieces(j) {
        let f = |x: f64| {
            let (u, du) = (trial.value(j, x), trial.derivative(j, x));
            problem.mu.eval(x) * du * test.derivative(q, x)
                + problem.beta_adv.eval(x) * du * test.value(q, x)
                + problem.rho_reac.eval(x) * u * test.value(q, x)
        };
        total += checked_integral(rule, a, b, p, f, q, j)?;
    }
    Ok(total)
}

/// `F(xi_q)`.
fn load(problem: &AdrProblem, rule: &GaussLegendre, test: &SineSystem, q: usize) -> Result<f64> {
    let p = q + 1;
    if let Some(f) = problem.forcing.constant() {
        let w = p as f64 * PI;
        return Ok(if p % 2 == 1 { f * 2.0 * SQRT_2 / (w * w) } else { 0.0 });
    }
    checked_integral(rule, 0.0, 1.0, p, |x| problem.forcing.eval(x) * test.value(q, x), q, usize::MAX)
}

fn check_sizes(setup: &PetrovGalerkinSetup, n: usize, m: usize) -> Result<()> {
    if n == 0 || n > setup.trial.len() {
        return Err(Error::dim(format!("N = {n} outside 1..={}", setup.trial.len())));
    }
    if m == 0 || m > setup.test_cap {
        return Err(Error::dim(format!("M = {m} outside 1..={}", setup.test_cap)));
    }
    Ok(())
}

/// Petrov-Galerkin system `B z = c` with `B_qj = a(phi_j, xi_q)` and
/// `c_q = F(xi_q)` on the first `n` trial and `m` test functions.
pub fn assemble_full(
    setup: &PetrovGalerkinSetup,
    problem: &AdrProblem,
    n: usize,
    m: usize,
) -> Result<(ComplexMatrix<f64>, Vec<C64>)> {
    check_sizes(setup, n, m)?;
    let rule = GaussLegendre::new(GAUSS_POINTS);
    let test = test_basis(m);
    let rows = (0..m)
        .into_par_iter()
        .map(|q| {
            let row = (0..n)
                .map(|j| entry(&setup.trial, problem, &rule, &test, j, q).map(|v| C64::new(v, 0.0)))
                .collect::<Result<Vec<_>>>()?;
            Ok((row, C64::new(load(problem, &rule, &test, q)?, 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (data, c): (Vec<Vec<C64>>, Vec<C64>) = rows.into_iter().unzip();
    let b = ComplexMatrix::new(m, n, data.into_iter().flatten().collect())?;
    if !b.is_finite() {
        return Err(Error::Argument("assembled matrix is not finite".into()));
    }
    Ok((b, c))
}

/// `mu_q = max_j |a(phi_j, xi_q)|^2` for `q < m`, without storing `B`.
pub fn coherence_scan(setup: &PetrovGalerkinSetup, problem: &AdrProblem, n: usize, m: usize) -> Result<Vec<f64>> {
    coherence_scan_range(setup, problem, n, 0, m)
}

/// [`coherence_scan`] restricted to test indices `from..to`.
pub fn coherence_scan_range(
    setup: &PetrovGalerkinSetup,
    problem: &AdrProblem,
    n: usize,
    from: usize,
    to: usize,
) -> Result<Vec<f64>> {
    check_sizes(setup, n, to)?;
    let rule = GaussLegendre::new(GAUSS_POINTS);
    let test = test_basis(to);
    (from..to)
        .into_par_iter()
        .map(|q| {
            let mut best = 0.0f64;
            for j in 0..n {
                let v = entry(&setup.trial, problem, &rule, &test, j, q)?;
                best = best.max(v * v);
            }
            Ok(best)
        })
        .collect()
}

/// Local a-coherence `mu^N` over `[M]` and the tight profile `nu = mu`.
pub fn local_a_coherence(
    setup: &PetrovGalerkinSetup,
    problem: &AdrProblem,
    n: usize,
    m: usize,
) -> Result<(Vec<f64>, CoherenceProfile)> {
    let mu = coherence_scan(setup, problem, n, m)?;
    let profile = CoherenceProfile::from_bounds(mu.clone())?;
    Ok((mu, profile))
}

/// Upper bound on `sum_{q >= cap} mu_q` (test frequencies above `cap`) by
/// integrating by parts against the test sines:
/// `|a(phi, xi_p)| <= sqrt2/w TV(mu phi') + sqrt2/w^2 (2 sup|b phi'| +
/// TV(b phi') + TV(rho phi))`, `w = p pi`.
pub fn coherence_tail_bound(setup: &PetrovGalerkinSetup, problem: &AdrProblem, n: usize, cap: usize) -> f64 {
    let (mu_sup, mu_tv) = (problem.mu.sup_abs(), problem.mu.total_variation());
    let (b_sup, b_tv) = (problem.beta_adv.sup_abs(), problem.beta_adv.total_variation());
    let (r_sup, r_tv) = (problem.rho_reac.sup_abs(), problem.rho_reac.total_variation());
    let mut stiff = 0.0f64;
    let mut lower = 0.0f64;
    for j in 0..n {
        // (sup|phi'|, TV(phi'), ||phi'||_1, sup|phi|)
        let (d_sup, d_tv, d_l1, v_sup) = match &setup.trial {
            H10Basis::Sine(s) => {
                let k = s.frequency(j) as f64;
                (SQRT_2, 2.0 * SQRT_2 * k, 2.0 * SQRT_2 / PI, SQRT_2 / (k * PI))
            }
            H10Basis::Hat(h) => {
                let (_, _, w, peak) = h.geometry(j);
                (peak / w, 4.0 * peak / w, 2.0 * peak, peak)
            }
        };
        // Sine trials are H^1_0-orthogonal to higher test sines.
        let sine_const_mu = matches!(setup.trial, H10Basis::Sine(_)) && problem.mu.constant().is_some();
        if !sine_const_mu {
            stiff = stiff.max(mu_sup * d_tv + d_sup * mu_tv);
        }
        let adv = 2.0 * b_sup * d_sup + b_sup * d_tv + d_sup * b_tv;
        let mass = r_sup * d_l1 + v_sup * r_tv;
        lower = lower.max(adv + mass);
    }
    let capf = cap as f64;
    let amp = stiff + lower / (capf * PI);
    2.0 / (PI * PI) * amp * amp / capf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::hat_hierarchical_system;

    fn sine_setup(n: usize, cap: usize, p: &AdrProblem) -> PetrovGalerkinSetup {
        PetrovGalerkinSetup::new(H10Basis::Sine(sine_h10_system(n).unwrap()), cap, p).unwrap()
    }

    #[test]
    fn diffusion_sine_sine_is_identity() {
        let p = AdrProblem::diffusion(1.0, 1.0);
        let s = sine_setup(8, 12, &p);
        let (b, c) = assemble_full(&s, &p, 8, 12).unwrap();
        for q in 0..12 {
            for j in 0..8 {
                let want = if q == j { 1.0 } else { 0.0 };
                assert!((b.get(q, j).re - want).abs() < 1e-15);
            }
        }
        // c_q = int xi_q = 2 sqrt2 / (q pi)^2 for odd frequencies
        assert!((c[0].re - 2.0 * SQRT_2 / (PI * PI)).abs() < 1e-15);
        assert_eq!(c[1].re, 0.0);
    }

    #[test]
    fn zero_forcing_gives_zero_load() {
        let p = AdrProblem::diffusion(1.0, 0.0);
        let s = sine_setup(4, 6, &p);
        let (_, c) = assemble_full(&s, &p, 4, 6).unwrap();
        assert!(c.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn quadrature_path_matches_closed_form() {
        use super::super::problem::{Coefficient, Profile};
        let constant = AdrProblem {
            mu: 1.5.into(),
            beta_adv: 0.7.into(),
            rho_reac: 2.0.into(),
            forcing: 1.0.into(),
        };
        // Same coefficients disguised as a profile force quadrature.
        let mut disguised = constant.clone();
        disguised.mu = Coefficient::Profile(Profile::Sine { offset: 1.5, amplitude: 0.0, frequency: 1.0 });
        let hat = H10Basis::Hat(hat_hierarchical_system(3).unwrap());
        let s = PetrovGalerkinSetup::new(hat, 16, &constant).unwrap();
        let (b1, _) = assemble_full(&s, &constant, 7, 16).unwrap();
        let (b2, _) = assemble_full(&s, &disguised, 7, 16).unwrap();
        let diff = b1.sub(&b2).unwrap().max_abs2().sqrt();
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn tail_bound_dominates_scan() {
        let p = AdrProblem { mu: 1.0.into(), beta_adv: 2.0.into(), rho_reac: 1.0.into(), forcing: 1.0.into() };
        let hat = H10Basis::Hat(hat_hierarchical_system(3).unwrap());
        let s = PetrovGalerkinSetup::new(hat, 4096, &p).unwrap();
        let mu = coherence_scan(&s, &p, 7, 4096).unwrap();
        let bound = coherence_tail_bound(&s, &p, 7, 1024);
        let actual: f64 = mu[1024..].iter().sum();
        assert!(actual <= bound, "{actual} > {bound}");
    }

    #[test]
    fn sine_diffusion_tail_vanishes() {
        let p = AdrProblem::diffusion(1.0, 1.0);
        let s = sine_setup(8, 64, &p);
        assert_eq!(coherence_tail_bound(&s, &p, 8, 8), 0.0);
    }
}
