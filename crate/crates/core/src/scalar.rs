use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the dense kernels are generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion of a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Convergence tolerance for iterative kernels: `1e-12` in double
    /// precision, a few ulps above machine epsilon otherwise.
    fn iter_tol() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(16.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `|z|^2` without the square root.
#[inline]
pub fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

/// Euclidean norm of a complex vector, scaled to avoid overflow.
pub fn norm2<T: Real>(v: &[Complex<T>]) -> T {
    let scale = v
        .iter()
        .fold(T::zero(), |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let ss: T = v
        .iter()
        .map(|z| {
            let (a, b) = (z.re / scale, z.im / scale);
            a * a + b * b
        })
        .sum();
    scale * ss.sqrt()
}

pub fn norm1<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm()).sum()
}

/// Hermitian inner product `<a, b> = sum conj(a_i) b_i`.
pub fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Embeds a real vector into the complex field.
pub fn complexify<T: Real>(v: &[T]) -> Vec<Complex<T>> {
    v.iter().map(|&x| Complex::new(x, T::zero())).collect()
}
