//! Real scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// A floating point field usable as the real part of the complex scalars.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// expressed in `f64` and converted with [`Real::lit`], so `f32` works but
/// only meets the looser thresholds.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

pub(crate) fn creal<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Hölder conjugate exponent `p / (p - 1)`.
pub fn conjugate_exponent<T: Real>(p: T) -> T {
    p / (p - T::one())
}

/// Unit-modulus phase of `z`, or zero when `z == 0`.
pub(crate) fn phase<T: Real>(z: C<T>) -> C<T> {
    let r = z.norm();
    if r == T::zero() {
        czero()
    } else {
        z / r
    }
}
