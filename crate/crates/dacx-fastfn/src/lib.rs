//! Fast functions of the inner variable `X = x/η`.
//!
//! The special functions `U_j^±(X) = e^{X^p}∫_{±∞}^X e^{−T^p}T^{j−1}dT`, the
//! ray-integral operator `J^±`, and expression trees built from them. Every
//! expression can be evaluated numerically and expanded at infinity; the two
//! representations agree up to the first omitted tail term.

pub mod eval;
pub mod expr;
pub mod tail;

use std::sync::Arc;

use dacx_num::Scalar;
use thiserror::Error;

pub use eval::{switch_point, QuadConfig};
pub use expr::{FastExpr, LaplaceData, Ray};
pub use tail::{Asymptotic, FastTail};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FastError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no asymptotic expansion: {0}")]
    NotAsymptotic(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

/// Tail `u_1..u_M` of `U_j` along `ray`, from the formal solution of
/// `U' = pX^{p−1}U + X^{j−1}`.
///
/// For `j ≥ p` the formal solution also has a polynomial part, which is
/// dropped here; use [`expr_tail`] on [`FastExpr::SpecialU`] to keep it.
pub fn u_tail<S: Scalar>(p: u32, j: u32, ray: Ray, order: usize) -> FastTail<S> {
    if j == 0 || j >= p {
        log::warn!("u_tail: j = {j} outside 1..=p-1 for p = {p}");
    }
    let _ = ray;
    tail::u_asymptotic::<S>(p, j, order).tail
}

/// Value of `U_j^{ray}(X)`.
pub fn u_eval(p: u32, j: u32, ray: Ray, x: f64, cfg: &QuadConfig) -> Result<f64, FastError> {
    eval::u_eval(p, j, ray, x, cfg)
}

/// `J^{ray} v` as an expression node.
pub fn j_apply<S: Scalar>(ray: Ray, p: u32, v: FastExpr<S>) -> FastExpr<S> {
    if v.is_zero() {
        return FastExpr::Zero;
    }
    FastExpr::JApply {
        ray,
        p,
        child: Arc::new(v),
    }
}

pub fn expr_eval<S: Scalar>(e: &FastExpr<S>, x: f64, cfg: &QuadConfig) -> Result<f64, FastError> {
    e.eval(x, cfg)
}

/// Expansion at infinity: polynomial part plus tail of order `order`.
pub fn expr_tail<S: Scalar>(e: &FastExpr<S>, order: usize) -> Result<Asymptotic<S>, FastError> {
    e.asymptotic(order)
}
