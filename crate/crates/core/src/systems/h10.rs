//! Bases of `H^1_0(0, 1)` that are orthonormal for `(u, v) = int u' v'`.

use std::f64::consts::{PI, SQRT_2};

use super::FunctionSystem;
use crate::error::{Error, Result};
use crate::C64;

/// `xi_q(x) = sqrt(2) sin(q pi x) / (q pi)`, `q = j + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SineSystem {
    n: usize,
}

/// Hierarchical hats on dyadic nodes. Index `j` sits on level
/// `l = floor(log2(j + 1)) + 1` at position `k = j + 1 - 2^(l-1)`, centred
/// at `(2k + 1) 2^-l` with half-width `2^-l`.
#[derive(Clone, Debug, PartialEq)]
pub struct HatSystem {
    levels: u32,
}

pub fn sine_h10_system(n: usize) -> Result<SineSystem> {
    if n == 0 {
        return Err(Error::dim("sine system needs N >= 1"));
    }
    Ok(SineSystem { n })
}

pub fn hat_hierarchical_system(levels: u32) -> Result<HatSystem> {
    if !(1..=30).contains(&levels) {
        return Err(Error::arg(format!("hat levels must lie in 1..=30, got {levels}")));
    }
    Ok(HatSystem { levels })
}

/// Closed-form value of `xi_p` and its first two antiderivatives.
#[inline]
fn sine_antiderivs(p: usize, x: f64) -> [f64; 3] {
    let w = p as f64 * PI;
    let (s, c) = (w * x).sin_cos();
    [SQRT_2 * s / w, -SQRT_2 * c / (w * w), -SQRT_2 * s / (w * w * w)]
}

/// Integrals of a trial function against the test sine `xi_p`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SinePairing {
    /// `int phi' xi_p'`
    pub stiffness: f64,
    /// `int phi' xi_p`
    pub advection: f64,
    /// `int phi xi_p`
    pub mass: f64,
}

impl SineSystem {
    pub fn frequency(&self, j: usize) -> usize {
        j + 1
    }

    pub fn value(&self, j: usize, x: f64) -> f64 {
        let w = (j + 1) as f64 * PI;
        SQRT_2 * (w * x).sin() / w
    }

    pub fn derivative(&self, j: usize, x: f64) -> f64 {
        SQRT_2 * ((j + 1) as f64 * PI * x).cos()
    }

    /// Exact pairing of trial `j` with test sine of frequency `p >= 1`.
    pub fn pair_with_sine(&self, j: usize, p: usize) -> SinePairing {
        let q = j + 1;
        let (pf, qf) = (p as f64, q as f64);
        let stiffness = if p == q { 1.0 } else { 0.0 };
        let advection = if p == q || (p + q) % 2 == 0 {
            0.0
        } else {
            // (2 / (p pi)) * int sin(p pi x) cos(q pi x) dx
            (2.0 / (pf * PI)) * (2.0 * pf / (PI * (pf * pf - qf * qf)))
        };
        let mass = if p == q { 1.0 / (qf * qf * PI * PI) } else { 0.0 };
        SinePairing { stiffness, advection, mass }
    }
}

impl HatSystem {
    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// `(level, centre, half_width, peak)` of hat `j`.
    pub fn geometry(&self, j: usize) -> (u32, f64, f64, f64) {
        let level = usize::BITS - (j + 1).leading_zeros();
        let k = j + 1 - (1usize << (level - 1));
        let h = (-(level as f64)).exp2();
        let centre = (2 * k + 1) as f64 * h;
        (level, centre, h, (0.5 * h).sqrt())
    }

    pub fn support(&self, j: usize) -> (f64, f64) {
        let (_, c, h, _) = self.geometry(j);
        (c - h, c + h)
    }

    pub fn value(&self, j: usize, x: f64) -> f64 {
        let (_, c, h, peak) = self.geometry(j);
        peak * (1.0 - (x - c).abs() / h).max(0.0)
    }

    /// One-sided derivative; zero outside the open support, the right
    /// slope at the centre.
    pub fn derivative(&self, j: usize, x: f64) -> f64 {
        let (_, c, h, peak) = self.geometry(j);
        if x <= c - h || x >= c + h {
            0.0
        } else if x < c {
            peak / h
        } else {
            -peak / h
        }
    }

    /// `int phi_j' g = (peak/h) (2 G(c) - G(c-h) - G(c+h))` for an
    /// antiderivative `G` of `g`.
    fn slope_integral(&self, j: usize, g: impl Fn(f64) -> f64) -> f64 {
        let (_, c, h, peak) = self.geometry(j);
        (peak / h) * (2.0 * g(c) - g(c - h) - g(c + h))
    }

    pub fn pair_with_sine(&self, j: usize, p: usize) -> SinePairing {
        SinePairing {
            stiffness: self.slope_integral(j, |x| sine_antiderivs(p, x)[0]),
            advection: self.slope_integral(j, |x| sine_antiderivs(p, x)[1]),
            // int phi xi = -int phi' Xi (boundary terms vanish).
            mass: -self.slope_integral(j, |x| sine_antiderivs(p, x)[2]),
        }
    }

    /// Exact `int phi_i' phi_j'` from the piecewise-constant slopes.
    pub fn h10_inner(&self, i: usize, j: usize) -> f64 {
        let pieces = |k: usize| {
            let (_, c, h, peak) = self.geometry(k);
            [(c - h, c, peak / h), (c, c + h, -peak / h)]
        };
        let mut acc = 0.0;
        for (a0, a1, sa) in pieces(i) {
            for (b0, b1, sb) in pieces(j) {
                let len = a1.min(b1) - a0.max(b0);
                if len > 0.0 {
                    acc += sa * sb * len;
                }
            }
        }
        acc
    }
}

/// An `H^1_0(0,1)`-orthonormal trial or test basis.
#[derive(Clone, Debug, PartialEq)]
pub enum H10Basis {
    Sine(SineSystem),
    Hat(HatSystem),
}

impl H10Basis {
    pub fn len(&self) -> usize {
        match self {
            H10Basis::Sine(s) => s.n,
            H10Basis::Hat(h) => (1usize << h.levels) - 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            H10Basis::Sine(_) => "sine",
            H10Basis::Hat(_) => "hat",
        }
    }

    pub fn value(&self, j: usize, x: f64) -> f64 {
        match self {
            H10Basis::Sine(s) => s.value(j, x),
            H10Basis::Hat(h) => h.value(j, x),
        }
    }

    pub fn derivative(&self, j: usize, x: f64) -> f64 {
        match self {
            H10Basis::Sine(s) => s.derivative(j, x),
            H10Basis::Hat(h) => h.derivative(j, x),
        }
    }

    /// Subintervals of `(0, 1)` on which the function is smooth.
    pub fn smooth_pieces(&self, j: usize) -> Vec<(f64, f64)> {
        match self {
            H10Basis::Sine(_) => vec![(0.0, 1.0)],
            H10Basis::Hat(h) => {
                let (_, c, w, _) = h.geometry(j);
                vec![(c - w, c), (c, c + w)]
            }
        }
    }

    pub fn pair_with_sine(&self, j: usize, p: usize) -> SinePairing {
        match self {
            H10Basis::Sine(s) => s.pair_with_sine(j, p),
            H10Basis::Hat(h) => h.pair_with_sine(j, p),
        }
    }

    /// `(phi_i, phi_j)_{H^1_0}`, exact.
    pub fn h10_inner(&self, i: usize, j: usize) -> f64 {
        match self {
            H10Basis::Sine(_) => {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            }
            H10Basis::Hat(h) => h.h10_inner(i, j),
        }
    }

    /// Largest derivative magnitude, bounding `|a(phi_j, xi_p)|` tails.
    pub fn max_slope(&self) -> f64 {
        match self {
            H10Basis::Sine(_) => SQRT_2,
            H10Basis::Hat(h) => {
                let w = (-(h.levels as f64)).exp2();
                (0.5 * w).sqrt() / w
            }
        }
    }
}

impl FunctionSystem for SineSystem {
    fn len(&self) -> usize {
        self.n
    }

    fn evaluate(&self, j: usize, omega: f64) -> C64 {
        C64::new(self.value(j, omega), 0.0)
    }

    fn sup_bound(&self) -> f64 {
        SQRT_2 / PI
    }

    fn riesz_bounds(&self) -> (f64, f64) {
        (1.0, 1.0)
    }

    fn name(&self) -> &'static str {
        "sine"
    }
}

impl FunctionSystem for HatSystem {
    fn len(&self) -> usize {
        (1usize << self.levels) - 1
    }

    fn evaluate(&self, j: usize, omega: f64) -> C64 {
        C64::new(self.value(j, omega), 0.0)
    }

    fn sup_bound(&self) -> f64 {
        0.5
    }

    fn riesz_bounds(&self) -> (f64, f64) {
        (1.0, 1.0)
    }

    fn name(&self) -> &'static str {
        "hat"
    }
}
