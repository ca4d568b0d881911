//! Numeric infrastructure shared by the dacx crates.
//!
//! - [`scalar`]: the [`Scalar`] trait, implemented for `f64` and exact rationals.
//! - [`quad`]: adaptive Gauss–Kronrod quadrature on finite intervals.
//! - [`ode`]: adaptive Dormand–Prince integration with an implicit fallback for stiff stretches.
//! - [`fit`]: weighted linear least squares with standard errors.
//! - [`special`]: log-gamma and friends.

pub mod fit;
pub mod ode;
pub mod quad;
pub mod scalar;
pub mod special;

pub use scalar::{Rational, Scalar};
