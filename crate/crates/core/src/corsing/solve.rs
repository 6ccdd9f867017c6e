use serde::{Deserialize, Serialize};

use super::assembly::{assemble_full, coherence_scan_range, coherence_tail_bound, PetrovGalerkinSetup};
use super::problem::AdrProblem;
use crate::analysis::{paper_constants, sample_complexity, ComplexityBound, ComplexityRegime};
use crate::error::{Error, Result};
use crate::numkit::{ComplexMatrix, RandomStream};
use crate::recovery::{omp, SparseSignal};
use crate::scalar::norm2;
use crate::systems::{CoherenceProfile, H10Basis};
use crate::C64;

/// OMP iterations per unit of sparsity.
pub const K_BAR: usize = 12;
/// Largest weak-form condition number covered by the recovery guarantee.
pub const KAPPA_LIMIT: f64 = 13.0 / 12.0;
/// Stream id of CORSING test draws.
const DRAW_STREAM: u64 = 0x434f_5253;
/// Scanning stops once the analytic tail bound is below this fraction of
/// the truncation threshold.
const TAIL_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorsingConfig {
    pub s: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub gamma: f64,
    pub m: usize,
    pub seed: u64,
    /// OMP iterations; defaults to `K_BAR * s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// A-priori bound `L` on `||u||_U`; defaults to `10 ||c||_2 / alpha`.
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub l_bound: Option<f64>,
    /// RIP level used for the guarantee diagnostics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl CorsingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.n == 0 || self.s > self.n {
            return Err(Error::arg(format!("need 1 <= s <= N, got s = {}, N = {}", self.s, self.n)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Range { parameter: "gamma", value: self.gamma, interval: "(0, 1)".into() });
        }
        if self.m == 0 {
            return Err(Error::arg("need m >= 1 test samples"));
        }
        if let Some(l) = self.l_bound {
            if !(l > 0.0) {
                return Err(Error::arg(format!("L must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

/// `kappa = (C_phi C_xi beta^2) / (c_phi c_xi alpha^2)`.
pub fn condition_number_kappa(setup: &PetrovGalerkinSetup) -> Result<f64> {
    let vals = [setup.c_phi, setup.upper_phi, setup.c_xi, setup.upper_xi, setup.alpha, setup.beta];
    if vals.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::arg("Riesz, inf-sup and continuity constants must be positive"));
    }
    Ok(setup.upper_phi * setup.upper_xi * setup.beta * setup.beta
        / (setup.c_phi * setup.c_xi * setup.alpha * setup.alpha))
}

/// Chosen truncation level and the tail sums around it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    #[serde(rename = "M")]
    pub m: usize,
    pub threshold: f64,
    /// `sum_{q > M} mu_q`.
    pub tail: f64,
    /// `sum_{q > M - 1} mu_q`, absent for `M = 0`.
    pub tail_before: Option<f64>,
    /// Number of tests whose coherence was computed exactly.
    pub scanned: usize,
    /// Analytic bound used for the tests beyond `scanned`.
    pub tail_beyond_scan: f64,
}

/// Smallest `M` with `sum_{q > M} mu_q <= alpha^2 gamma c_phi c_xi / s`.
/// `mu` holds the computed values; `tail_beyond` bounds the rest.
pub fn choose_truncation(
    mu: &[f64],
    tail_beyond: f64,
    s: usize,
    gamma: f64,
    alpha: f64,
    c_phi: f64,
    c_xi: f64,
) -> Result<Truncation> {
    if s == 0 {
        return Err(Error::arg("s must be positive"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Range { parameter: "gamma", value: gamma, interval: "(0, 1)".into() });
    }
    if !(alpha > 0.0 && c_phi > 0.0 && c_xi > 0.0) {
        return Err(Error::arg("alpha, c_phi and c_xi must be positive"));
    }
    let threshold = alpha * alpha * gamma * c_phi * c_xi / s as f64;
    let cap = mu.len();
    let mut tails = vec![0.0; cap + 1];
    tails[cap] = tail_beyond;
    for q in (0..cap).rev() {
        tails[q] = tails[q + 1] + mu[q];
    }
    if tails[cap] > threshold {
        return Err(Error::Truncation { cap, tail: tails[cap], threshold });
    }
    let m = tails.iter().position(|&t| t <= threshold).expect("tails[cap] qualifies");
    Ok(Truncation {
        m,
        threshold,
        tail: tails[m],
        tail_before: m.checked_sub(1).map(|k| tails[k]),
        scanned: cap,
        tail_beyond_scan: tail_beyond,
    })
}

/// `T_L v = min(1, L / ||v||_U) v`; returns the image and whether it moved.
pub fn truncate_norm(x: &[C64], trial: &H10Basis, l_bound: f64) -> (Vec<C64>, bool) {
    let nrm = h1_norm(x, trial);
    if nrm <= l_bound {
        (x.to_vec(), false)
    } else {
        let f = l_bound / nrm;
        (x.iter().map(|z| z * f).collect(), true)
    }
}

/// `||sum_j x_j phi_j||_U` through the trial Gram.
pub fn h1_norm(x: &[C64], trial: &H10Basis) -> f64 {
    if let H10Basis::Sine(_) = trial {
        return norm2(x);
    }
    let nz: Vec<usize> = (0..x.len()).filter(|&j| x[j].norm() > 0.0).collect();
    let mut acc = 0.0;
    for &i in &nz {
        for &j in &nz {
            let g = trial.h10_inner(i, j);
            if g != 0.0 {
                acc += g * (x[i].conj() * x[j]).re;
            }
        }
    }
    acc.max(0.0).sqrt()
}

/// `||sum_j (u_j - r_j) phi_j||_U`.
pub fn h1_error(u_hat: &[C64], reference: &[C64], trial: &H10Basis) -> Result<f64> {
    if u_hat.len() != reference.len() {
        return Err(Error::dim(format!(
            "{} coefficients against {} reference coefficients",
            u_hat.len(),
            reference.len()
        )));
    }
    if u_hat.len() > trial.len() {
        return Err(Error::dim("more coefficients than trial functions"));
    }
    let d: Vec<C64> = u_hat.iter().zip(reference).map(|(a, b)| a - b).collect();
    Ok(h1_norm(&d, trial))
}

/// Everything about a CORSING discretization that does not depend on the
/// random test draws: truncation level, the assembled `M x N` system and
/// the sampling profile.
#[derive(Clone, Debug)]
pub struct CorsingPlan {
    pub setup: PetrovGalerkinSetup,
    pub problem: AdrProblem,
    pub n: usize,
    pub s: usize,
    pub gamma: f64,
    pub truncation: Truncation,
    /// `mu_q^N` over every scanned test.
    pub mu: Vec<f64>,
    pub b: ComplexMatrix<f64>,
    pub c: Vec<C64>,
    pub nu: CoherenceProfile,
    pub kappa: f64,
}

impl CorsingPlan {
    /// Scans the local a-coherence (doubling the scanned range until the
    /// analytic tail is negligible), truncates with sparsity
    /// `(K_BAR + 1) s`, and assembles the truncated system.
    pub fn prepare(setup: &PetrovGalerkinSetup, problem: &AdrProblem, config: &CorsingConfig) -> Result<Self> {
        config.validate()?;
        problem.validate()?;
        let n = config.n;
        if n > setup.n_max() {
            return Err(Error::dim(format!("N = {n} exceeds the trial basis size {}", setup.n_max())));
        }
        let kappa = condition_number_kappa(setup)?;
        let s_trunc = (K_BAR + 1) * config.s;
        let threshold = setup.alpha * setup.alpha * config.gamma * setup.c_phi * setup.c_xi / s_trunc as f64;
        let mut cap = setup.test_cap.min((4 * n).max(256));
        let mut mu = coherence_scan_range(setup, problem, n, 0, cap)?;
        let mut beyond = coherence_tail_bound(setup, problem, n, cap);
        while beyond > TAIL_SLACK * threshold && cap < setup.test_cap {
            let next = (2 * cap).min(setup.test_cap);
            mu.extend(coherence_scan_range(setup, problem, n, cap, next)?);
            cap = next;
            beyond = coherence_tail_bound(setup, problem, n, cap);
        }
        let truncation = choose_truncation(&mu, beyond, s_trunc, config.gamma, setup.alpha, setup.c_phi, setup.c_xi)?;
        let m_tests = truncation.m.max(1);
        let (b, c) = assemble_full(setup, problem, n, m_tests)?;
        let nu = CoherenceProfile::from_bounds(mu[..m_tests].to_vec())?;
        if nu.nu_l1 <= 0.0 {
            return Err(Error::Sampling("local a-coherence vanishes on every retained test".into()));
        }
        Ok(Self {
            setup: setup.clone(),
            problem: problem.clone(),
            n,
            s: config.s,
            gamma: config.gamma,
            truncation,
            mu,
            b,
            c,
            nu,
            kappa,
        })
    }

    /// Replaces the tight profile by a caller-supplied upper bound.
    pub fn with_profile(mut self, nu: CoherenceProfile) -> Result<Self> {
        if !nu.dominates(&self.b) {
            return Err(Error::arg("profile does not dominate the local a-coherence of B"));
        }
        if nu.nu_l1 <= 0.0 {
            return Err(Error::Sampling("all-zero coherence profile".into()));
        }
        self.nu = nu;
        Ok(self)
    }

    pub fn tests(&self) -> usize {
        self.b.rows()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.nu.nu.iter().map(|v| v / self.nu.nu_l1).collect()
    }

    /// i.i.d. test indices `tau_1..tau_m` from `p = nu / ||nu||_1`.
    pub fn draw_tests(&self, m: usize, seed: u64) -> Vec<usize> {
        let cumulative: Vec<f64> = self
            .nu
            .nu
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        let mut rng = RandomStream::new(seed, DRAW_STREAM);
        (0..m).map(|_| rng.categorical(&cumulative)).collect()
    }

    /// Preconditioned system `(D A, D y)` for the given draws.
    pub fn sketch(&self, tests: &[usize]) -> Result<(ComplexMatrix<f64>, Vec<C64>, Vec<f64>)> {
        let m = tests.len();
        let p = self.probabilities();
        let mut d = Vec::with_capacity(m);
        for &t in tests {
            if !(p[t] > 0.0) {
                return Err(Error::Sampling(format!("drew test {t} with zero probability")));
            }
            d.push(1.0 / (m as f64 * p[t]).sqrt());
        }
        let a = self.b.select_rows(tests).scale_rows(&d);
        let y = tests.iter().zip(&d).map(|(&t, &di)| self.c[t] * di).collect();
        Ok((a, y, d))
    }

    pub fn solve(&self, config: &CorsingConfig) -> Result<CorsingSolution> {
        config.validate()?;
        if config.n != self.n || config.s != self.s || config.gamma != self.gamma {
            return Err(Error::arg("config (s, N, gamma) differs from the prepared plan"));
        }
        let tests = self.draw_tests(config.m, config.seed);
        let (a, y, _) = self.sketch(&tests)?;
        let k_requested = config.k.unwrap_or(K_BAR * config.s);
        let k_used = k_requested.min(config.m).min(self.n);
        let out = omp(&a, &y, k_used)?;
        let l_bound = config.l_bound.unwrap_or(10.0 * norm2(&self.c) / self.setup.alpha);
        let norm_before = h1_norm(&out.estimate, &self.setup.trial);
        let (x, truncated) = truncate_norm(&out.estimate, &self.setup.trial, l_bound);
        Ok(CorsingSolution {
            x_hat: SparseSignal::from_dense(&x),
            drawn_tests: tests,
            m_used: self.tests(),
            kappa: self.kappa,
            kappa_warning: self.kappa >= KAPPA_LIMIT,
            trial: self.setup.trial.clone(),
            diagnostics: CorsingDiagnostics {
                residual_l2: out.residual_l2,
                omp_iterations: out.iterations,
                k_requested,
                k_used,
                selection_path: out.selection_path,
                degenerate: out.degenerate,
                l_bound,
                norm_before_truncation: norm_before,
                truncated,
                nu_l1: self.nu.nu_l1,
                truncation: self.truncation.clone(),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorsingDiagnostics {
    /// `||D A x - D y||_2` before truncation.
    pub residual_l2: f64,
    pub omp_iterations: usize,
    pub k_requested: usize,
    /// `min(k, m, N)`.
    pub k_used: usize,
    pub selection_path: Vec<usize>,
    pub degenerate: bool,
    #[serde(rename = "L")]
    pub l_bound: f64,
    pub norm_before_truncation: f64,
    pub truncated: bool,
    pub nu_l1: f64,
    pub truncation: Truncation,
}

#[derive(Clone, Debug)]
pub struct CorsingSolution {
    pub x_hat: SparseSignal<f64>,
    pub drawn_tests: Vec<usize>,
    pub m_used: usize,
    pub kappa: f64,
    pub kappa_warning: bool,
    pub trial: H10Basis,
    pub diagnostics: CorsingDiagnostics,
}

impl CorsingSolution {
    pub fn coefficients(&self) -> Vec<C64> {
        self.x_hat.to_dense()
    }

    /// `u_hat(x) = sum_j x_hat_j phi_j(x)`.
    pub fn evaluate(&self, x: f64) -> C64 {
        self.x_hat.entries().iter().map(|&(j, v)| v * self.trial.value(j, x)).sum()
    }

    pub fn record(&self, h1_error_vs_reference: Option<f64>) -> SolutionRecord {
        SolutionRecord {
            x_hat: self.x_hat.entries().iter().map(|&(j, v)| (j, v.re, v.im)).collect(),
            n: self.x_hat.dim(),
            drawn_tests: self.drawn_tests.clone(),
            m_used: self.m_used,
            kappa: self.kappa,
            kappa_warning: self.kappa_warning,
            residual: self.diagnostics.residual_l2,
            h1_error_vs_reference,
            truncated: self.diagnostics.truncated,
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// JSON form of a [`CorsingSolution`]; `x_hat` lists `(index, re, im)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub x_hat: Vec<(usize, f64, f64)>,
    #[serde(rename = "N")]
    pub n: usize,
    pub drawn_tests: Vec<usize>,
    #[serde(rename = "M_used")]
    pub m_used: usize,
    pub kappa: f64,
    pub kappa_warning: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h1_error_vs_reference: Option<f64>,
    pub truncated: bool,
    pub diagnostics: CorsingDiagnostics,
}

/// Full pipeline: [`CorsingPlan::prepare`] then [`CorsingPlan::solve`].
pub fn corsing_solve(
    setup: &PetrovGalerkinSetup,
    problem: &AdrProblem,
    config: &CorsingConfig,
) -> Result<CorsingSolution> {
    CorsingPlan::prepare(setup, problem, config)?.solve(config)
}

/// Inputs and outputs of the CORSING RIP sample bound for one plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorsingRipInputs {
    pub bound: ComplexityBound,
    /// `(1 - gamma) c_phi c_xi alpha^2`.
    pub c_b: f64,
    /// `C_phi C_xi beta^2`.
    #[serde(rename = "C_B")]
    pub upper_b: f64,
    /// Necessary condition `epsilon > 1 - 1/kappa`.
    pub necessary_lower: f64,
    /// `1 + (1 + C) / sqrt(1 - epsilon)` of the OMP error bound.
    pub omp_error_constant: f64,
}

pub fn omp_error_constant(epsilon: f64) -> f64 {
    1.0 + (1.0 + paper_constants().c_omp) / (1.0 - epsilon).sqrt()
}

pub fn corsing_rip_inputs(plan: &CorsingPlan, epsilon: f64) -> Result<CorsingRipInputs> {
    let setup = &plan.setup;
    let regime = ComplexityRegime::CorsingRip {
        nu_l1: plan.nu.nu_l1,
        c_phi: setup.upper_phi,
        c_xi: setup.upper_xi,
        beta: setup.beta,
        kappa: plan.kappa,
        gamma: plan.gamma,
        s: plan.s,
        n: plan.n,
        epsilon,
    };
    let bound = sample_complexity(&regime)?;
    Ok(CorsingRipInputs {
        bound,
        c_b: (1.0 - plan.gamma) * setup.c_phi * setup.c_xi * setup.alpha * setup.alpha,
        upper_b: setup.upper_phi * setup.upper_xi * setup.beta * setup.beta,
        necessary_lower: 1.0 - 1.0 / plan.kappa,
        omp_error_constant: omp_error_constant(epsilon),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::sine_h10_system;

    fn sine_plan(n: usize, s: usize) -> (CorsingPlan, CorsingConfig) {
        let p = AdrProblem::diffusion(1.0, 1.0);
        let setup = PetrovGalerkinSetup::new(H10Basis::Sine(sine_h10_system(n).unwrap()), 1 << 12, &p).unwrap();
        let cfg = CorsingConfig { s, n, gamma: 0.5, m: 3 * n, seed: 1, k: None, l_bound: None, epsilon: None };
        (CorsingPlan::prepare(&setup, &p, &cfg).unwrap(), cfg)
    }

    #[test]
    fn kappa_arithmetic() {
        let p = AdrProblem::diffusion(1.0, 1.0);
        let s = PetrovGalerkinSetup::new(H10Basis::Sine(sine_h10_system(4).unwrap()), 8, &p).unwrap();
        assert_eq!(condition_number_kappa(&s).unwrap(), 1.0);
        let s2 = s.clone().with_constants(1.0, 2.0).unwrap();
        assert_eq!(condition_number_kappa(&s2).unwrap(), 4.0);
    }

    #[test]
    fn truncation_is_minimal() {
        let mu = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let t = choose_truncation(&mu, 0.01, 2, 0.5, 1.0, 1.0, 1.0).unwrap();
        assert!(t.tail <= t.threshold);
        assert!(t.tail_before.unwrap() > t.threshold);
        assert_eq!(t.m, 3);
        assert!(matches!(
            choose_truncation(&mu, 1.0, 2, 0.5, 1.0, 1.0, 1.0),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn sine_diffusion_keeps_exactly_n_tests() {
        let (plan, _) = sine_plan(10, 2);
        assert_eq!(plan.tests(), 10);
        assert!(plan.probabilities().iter().all(|&p| (p - 0.1).abs() < 1e-15));
    }

    #[test]
    fn uniform_preconditioner() {
        let (plan, _) = sine_plan(10, 2);
        let (_, _, d) = plan.sketch(&[0, 3, 3, 7]).unwrap();
        for v in d {
            assert!((v - (10.0f64 / 4.0).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn truncation_operator_caps_norm() {
        let trial = H10Basis::Sine(sine_h10_system(3).unwrap());
        let v = vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0), C64::new(0.0, 0.0)];
        let (w, moved) = truncate_norm(&v, &trial, 2.0);
        assert!(moved && (h1_norm(&w, &trial) - 2.0).abs() < 1e-14);
        let (w, moved) = truncate_norm(&v, &trial, 6.0);
        assert!(!moved && w == v);
    }

    #[test]
    fn solve_is_deterministic() {
        let (plan, cfg) = sine_plan(16, 2);
        let a = plan.solve(&cfg).unwrap();
        let b = plan.solve(&cfg).unwrap();
        assert_eq!(a.diagnostics.selection_path, b.diagnostics.selection_path);
        assert_eq!(a.coefficients(), b.coefficients());
    }

    #[test]
    fn rip_interval_for_unit_kappa() {
        let (plan, _) = sine_plan(8, 1);
        let r = corsing_rip_inputs(&plan, 0.9).unwrap();
        assert!((r.bound.admissible_interval.0 - plan.gamma).abs() < 1e-15);
        assert_eq!(r.necessary_lower, 0.0);
        assert!(corsing_rip_inputs(&plan, 0.4).is_err());
    }
}
