//! Products and left composition.
//!
//! A slow×fast product expands as
//! `a(x)h(X) = Σ_{ν<K} a_ν η^ν T^ν h + Σ_{1≤ν<K} h_ν η^ν S^ν a + η^K (S^K a)(T^K h)`
//! with `K = min(M_a, M_h)`. The remainder is unknown at the truncation
//! orders, so levels from `K` on are dropped from the result.

use dacx_fastfn::{FastExpr, FastTail};
use dacx_num::Scalar;

use crate::series::{tail_mul, valuation, CombinedSeries, FastCoefficient, SlowSeries, Term};
use crate::CoreError;

fn exact_zero<S: Scalar>(h: &FastCoefficient<S>) -> bool {
    h.is_zero() && h.expr.as_ref().is_some_and(|e| e.is_zero())
}

struct Acc<S> {
    slow: Vec<Option<SlowSeries<S>>>,
    tail: Vec<Option<FastTail<S>>>,
    /// `None` once a contribution without an expression has been added.
    exprs: Vec<Option<Vec<FastExpr<S>>>>,
}

impl<S: Scalar> Acc<S> {
    fn new(levels: usize) -> Self {
        Self {
            slow: vec![None; levels],
            tail: vec![None; levels],
            exprs: vec![Some(Vec::new()); levels],
        }
    }

    fn add_slow(&mut self, l: usize, a: SlowSeries<S>) {
        if l < self.slow.len() {
            self.slow[l] = Some(match self.slow[l].take() {
                Some(b) => b.add(&a),
                None => a,
            });
        }
    }

    fn add_fast(&mut self, l: usize, t: FastTail<S>, e: Option<FastExpr<S>>) {
        if l >= self.tail.len() {
            return;
        }
        self.tail[l] = Some(match self.tail[l].take() {
            Some(b) => b.add(&t),
            None => t,
        });
        match (self.exprs[l].as_mut(), e) {
            (Some(v), Some(e)) => v.push(e),
            _ => self.exprs[l] = None,
        }
    }

    /// Contributions of `η^base · a(x) h(X)`.
    fn mixed(&mut self, base: usize, a: &SlowSeries<S>, h: &FastCoefficient<S>) {
        if exact_zero(h) {
            return;
        }
        let k = a.order().min(h.order());
        for nu in 0..k {
            let l = base + nu;
            if l >= self.slow.len() {
                break;
            }
            let a_nu = &a.coeffs[nu];
            if !a_nu.is_zero() {
                let mut t = h.tail.clone();
                let mut e = h.expr.clone();
                for _ in 0..nu {
                    t = t.shift();
                    e = e.map(|e| e.t_shift());
                }
                self.add_fast(l, t.scale(a_nu), e.map(|e| e.scale(a_nu.clone())));
            }
            if nu >= 1 {
                let h_nu = h.tail.get(nu);
                if !h_nu.is_zero() {
                    self.add_slow(l, SlowSeries::new(a.coeffs[nu..].to_vec()).scale(&h_nu));
                }
            }
        }
    }

    fn finish(self, p: u32, default_order: usize) -> CombinedSeries<S> {
        let terms = self
            .slow
            .into_iter()
            .zip(self.tail)
            .zip(self.exprs)
            .map(|((s, t), e)| {
                let slow = s.unwrap_or_else(|| SlowSeries::zeros(default_order));
                let fast = match t {
                    None => FastCoefficient::zero(default_order),
                    Some(tail) => FastCoefficient {
                        tail,
                        expr: e.map(FastExpr::sum),
                        poly: Vec::new(),
                    },
                };
                Term { slow, fast }
            })
            .collect();
        CombinedSeries { p, terms }
    }
}

fn mixed_depth<S: Scalar>(a: &SlowSeries<S>, h: &FastCoefficient<S>) -> usize {
    if exact_zero(h) {
        usize::MAX
    } else {
        a.order().min(h.order())
    }
}

/// Product of two combined series.
pub fn mul<S: Scalar>(
    y: &CombinedSeries<S>,
    z: &CombinedSeries<S>,
) -> Result<CombinedSeries<S>, CoreError> {
    y.check_p(z)?;
    let mut levels = y.eta_order().min(z.eta_order());
    for (n, ty) in y.terms.iter().enumerate() {
        for (m, tz) in z.terms.iter().enumerate() {
            if n + m >= levels {
                break;
            }
            let d = mixed_depth(&ty.slow, &tz.fast).min(mixed_depth(&tz.slow, &ty.fast));
            levels = levels.min((n + m).saturating_add(d));
        }
    }
    let mut acc = Acc::new(levels);
    for (n, ty) in y.terms.iter().enumerate().take(levels) {
        for (m, tz) in z.terms.iter().enumerate().take(levels - n) {
            let l = n + m;
            acc.add_slow(l, ty.slow.mul(&tz.slow));
            if !exact_zero(&ty.fast) && !exact_zero(&tz.fast) {
                let e = match (&ty.fast.expr, &tz.fast.expr) {
                    (Some(a), Some(b)) => Some(FastExpr::product(vec![a.clone(), b.clone()])),
                    _ => None,
                };
                acc.add_fast(l, tail_mul(&ty.fast.tail, &tz.fast.tail), e);
            }
            acc.mixed(l, &ty.slow, &tz.fast);
            acc.mixed(l, &tz.slow, &ty.fast);
        }
    }
    let default_order = y
        .terms
        .iter()
        .chain(&z.terms)
        .map(|t| t.slow.order().max(t.fast.order()))
        .max()
        .unwrap_or(0);
    Ok(acc.finish(y.p, default_order))
}

/// `Σ_j P_j ŷ^j` for a series `P̂(y) = Σ_j P_j y^j` with combined-series
/// coefficients and `val(ŷ) ≥ 1`.
pub fn compose_left<S: Scalar>(
    coeffs: &[CombinedSeries<S>],
    y: &CombinedSeries<S>,
) -> Result<CombinedSeries<S>, CoreError> {
    if valuation(y) == 0 {
        return Err(CoreError::Precondition(
            "composition needs a_0 = 0 and g_0 = 0".into(),
        ));
    }
    let Some(first) = coeffs.first() else {
        return Err(CoreError::Empty("composition with an empty outer series"));
    };
    first.check_p(y)?;
    let levels = y.eta_order();
    let mut acc = first.truncate_levels(levels);
    let mut pow = y.clone();
    for (j, c) in coeffs.iter().enumerate().skip(1) {
        // ŷ^j has valuation ≥ j.
        if j >= levels {
            break;
        }
        acc = acc.add(&mul(c, &pow)?)?;
        if j + 1 < coeffs.len() && j + 1 < levels {
            pow = mul(&pow, y)?;
        }
    }
    Ok(acc)
}
