//! Real scalar abstraction shared by every operator in the crate.
//!
//! Entries are always `Complex<T>`; `T` is the underlying real type. The
//! checks are calibrated for `f64`, but everything also compiles and runs in
//! `f32` (with correspondingly looser tolerances).

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real floating-point type usable as the component type of operator entries.
pub trait Real:
    RealField + Float + FromPrimitive + ToPrimitive + Copy + Send + Sync + Debug + Display + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 literal representable in scalar type")
}

/// Builds a complex number from two `f64` components.
#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// Lifts a real into the complex plane.
#[inline]
pub fn real<T: Real>(v: T) -> Complex<T> {
    Complex::new(v, T::zero())
}

#[inline]
pub fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// `[re, im]` pair in `f64`, used for reporting.
#[inline]
pub fn to_pair<T: Real>(z: Complex<T>) -> [f64; 2] {
    [to_f64(z.re), to_f64(z.im)]
}

#[inline]
pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(to_f64(z.re), to_f64(z.im))
}

/// Smallest normalizer used in relative residuals: `1e-300`, or the smallest
/// positive normal value when `1e-300` underflows.
#[inline]
pub fn norm_floor<T: Real>() -> T {
    Float::max(lit::<T>(1e-300), T::min_positive_value())
}

/// `z^k` for signed integer `k`.
#[inline]
pub fn ipow<T: Real>(z: Complex<T>, k: i32) -> Complex<T> {
    z.powi(k)
}

#[inline]
pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    Float::is_finite(z.re) && Float::is_finite(z.im)
}

/// `max(a, b)` without the trait-method ambiguity between `Float` and
/// `RealField`.
#[inline]
pub fn rmax<T: Real>(a: T, b: T) -> T {
    Float::max(a, b)
}

#[inline]
pub fn rsqrt<T: Real>(a: T) -> T {
    Float::sqrt(a)
}

#[inline]
pub fn rabs<T: Real>(a: T) -> T {
    Float::abs(a)
}

pub fn fmt_complex<T: Real>(z: Complex<T>) -> String {
    format!("{}{:+}i", to_f64(z.re), to_f64(z.im))
}
