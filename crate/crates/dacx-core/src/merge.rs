//! Composite expansion from two combined series attached at the ends of `[a, d]`.
//!
//! The left series lives in `x − a` (fast variable `(x − a)/η`), the right one
//! in `d − x`. The composite is `Σ (c_n(x) + g_n((x−a)/η) + h_n((d−x)/η)) η^n`
//! with, near `a`, `c_n = a_n − Σ_{l<n} h_{l,n−l} (d−x)^{l−n}` and, near `d`,
//! `c_n = b_n − Σ_{l<n} g_{l,n−l} (x−a)^{l−n}`. Both forms must agree on the
//! overlap `[b, c]`.

use dacx_fastfn::QuadConfig;
use dacx_num::Scalar;

use crate::series::CombinedSeries;
use crate::CoreError;

/// Samples used for the overlap check.
const OVERLAP_SAMPLES: usize = 17;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointSeries<S> {
    pub a: f64,
    pub d: f64,
    /// Overlap `[b, c]`; its midpoint separates the two slow forms.
    pub overlap: (f64, f64),
    pub left: CombinedSeries<S>,
    pub right: CombinedSeries<S>,
}

impl<S: Scalar> TwoPointSeries<S> {
    pub fn eta_order(&self) -> usize {
        self.left.eta_order().min(self.right.eta_order())
    }

    fn left_form(&self, n: usize, x: f64) -> f64 {
        let mut v = self.left.terms[n].slow.eval(x - self.a);
        for l in 0..n {
            v -= self.right.terms[l].fast.tail.get(n - l).to_f64()
                * (self.d - x).powi(l as i32 - n as i32);
        }
        v
    }

    fn right_form(&self, n: usize, x: f64) -> f64 {
        let mut v = self.right.terms[n].slow.eval(self.d - x);
        for l in 0..n {
            v -= self.left.terms[l].fast.tail.get(n - l).to_f64()
                * (x - self.a).powi(l as i32 - n as i32);
        }
        v
    }

    /// Slow coefficient `c_n(x)`.
    pub fn slow_value(&self, n: usize, x: f64) -> f64 {
        if x <= 0.5 * (self.overlap.0 + self.overlap.1) {
            self.left_form(n, x)
        } else {
            self.right_form(n, x)
        }
    }

    /// Partial sum over the first `levels` levels.
    pub fn eval(
        &self,
        x: f64,
        eta: f64,
        levels: usize,
        cfg: &QuadConfig,
    ) -> Result<f64, CoreError> {
        if levels > self.eta_order() {
            return Err(CoreError::Precondition(format!(
                "{levels} levels requested from a merge with {}",
                self.eta_order()
            )));
        }
        let (xl, xr) = ((x - self.a) / eta, (self.d - x) / eta);
        let mut v = 0.0;
        for n in (0..levels).rev() {
            let level = self.slow_value(n, x)
                + self.left.terms[n].fast.eval(xl, cfg)?
                + self.right.terms[n].fast.eval(xr, cfg)?;
            v = v * eta + level;
        }
        Ok(v)
    }
}

/// Merges `left` (attached at `a`) and `right` (attached at `d`), checking
/// that both slow forms agree on `overlap` within `tol` (relative to 1 and the
/// values compared).
pub fn two_point_merge<S: Scalar>(
    left: &CombinedSeries<S>,
    a: f64,
    right: &CombinedSeries<S>,
    d: f64,
    overlap: (f64, f64),
    tol: f64,
) -> Result<TwoPointSeries<S>, CoreError> {
    left.check_p(right)?;
    let (b, c) = overlap;
    if !(a < b && b <= c && c < d) {
        return Err(CoreError::Config(format!(
            "need a < b ≤ c < d, got a={a}, [b,c]=[{b},{c}], d={d}"
        )));
    }
    let merged = TwoPointSeries {
        a,
        d,
        overlap,
        left: left.clone(),
        right: right.clone(),
    };
    for n in 0..merged.eta_order() {
        for i in 0..OVERLAP_SAMPLES {
            let x = b + (c - b) * i as f64 / (OVERLAP_SAMPLES - 1) as f64;
            let (l, r) = (merged.left_form(n, x), merged.right_form(n, x));
            let deviation = (l - r).abs();
            if deviation > tol * 1f64.max(l.abs()).max(r.abs()) {
                return Err(CoreError::OverlapMismatch { n, x, deviation });
            }
        }
    }
    Ok(merged)
}
