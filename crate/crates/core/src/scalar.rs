//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the spectral machinery is generic over (`f32` or `f64`).
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
    /// Converts an `f64` literal or parameter into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }

    /// Lossy conversion used for reports and linear algebra.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_i64_exact(x: i64) -> Self {
        Self::from_i64(x).expect("integer is representable")
    }

    fn from_usize_exact(x: usize) -> Self {
        Self::from_usize(x).expect("integer is representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{2πi t}`.
pub fn cis_turns<T: Real>(t: T) -> Complex<T> {
    // reduce to one turn before scaling so large arguments keep their phase
    let frac = t - t.round();
    let theta = T::TAU() * frac;
    Complex::new(theta.cos(), theta.sin())
}

pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

pub fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
