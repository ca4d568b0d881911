//! Coefficient field abstraction.
//!
//! Recurrences and algebra-law checks run over [`Rational`] so identities hold
//! exactly; evaluation and sweeps run over `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Field of series coefficients.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Converts a float. Rationals take the exact binary value.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Equality for exact fields, `|a − b| ≤ tol·max(1, |a|, |b|)` for floats.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }

    /// `exp` of a constant, when representable in the field.
    fn exp_s(&self) -> Option<Self>;
    /// `ln` of a constant, when representable in the field.
    fn ln_s(&self) -> Option<Self>;
    fn sin_s(&self) -> Option<Self>;
    fn cos_s(&self) -> Option<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= tol * scale
    }

    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }

    fn exp_s(&self) -> Option<Self> {
        Some(self.exp())
    }

    fn ln_s(&self) -> Option<Self> {
        (*self > 0.0).then(|| self.ln())
    }

    fn sin_s(&self) -> Option<Self> {
        Some(self.sin())
    }

    fn cos_s(&self) -> Option<Self> {
        Some(self.cos())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(Rational::zero)
    }

    fn to_f64(&self) -> f64 {
        if let Some(v) = ToPrimitive::to_f64(self) {
            if v.is_finite() {
                return v;
            }
        }
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn magnitude(&self) -> f64 {
        Scalar::to_f64(&self.abs())
    }

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn exp_s(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }

    fn ln_s(&self) -> Option<Self> {
        self.is_one().then(Rational::zero)
    }

    fn sin_s(&self) -> Option<Self> {
        self.is_zero().then(Rational::zero)
    }

    fn cos_s(&self) -> Option<Self> {
        self.is_zero().then(Rational::one)
    }
}

/// Converts between scalar fields through `f64` unless both are the same exact field.
pub fn convert<A: Scalar, B: Scalar>(a: &A) -> B {
    if A::EXACT && B::EXACT {
        // Both exact means both are `Rational`.
        let any: &dyn std::any::Any = a;
        if let Some(r) = any.downcast_ref::<Rational>() {
            let boxed: Box<dyn std::any::Any> = Box::new(r.clone());
            if let Ok(b) = boxed.downcast::<B>() {
                return *b;
            }
        }
    }
    B::from_f64(a.to_f64())
}
