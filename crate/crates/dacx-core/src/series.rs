//! Truncated combined series `Σ_n (a_n(x) + g_n(x/η)) η^n` and their coefficients.

use dacx_fastfn::{FastExpr, FastTail, QuadConfig};
use dacx_num::Scalar;

use crate::CoreError;

/// Taylor germ `a_0..a_{M−1}` at `x = 0`. The truncation order `M` is the length.
#[derive(Debug, Clone, PartialEq)]
pub struct SlowSeries<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> SlowSeries<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            coeffs: vec![S::zero(); order],
        }
    }

    /// `x^k` to order `order`.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut a = Self::zeros(order);
        if k < order {
            a.coeffs[k] = S::one();
        }
        a
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_k`; zero past the truncation order.
    pub fn get(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient, or `M` when all vanish.
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.order())
    }

    /// `S a = (a − a(0))/x`.
    pub fn shift(&self) -> Result<Self, CoreError> {
        if self.coeffs.is_empty() {
            return Err(CoreError::Empty("slow shift of an order-0 germ"));
        }
        Ok(Self {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            coeffs: self.coeffs.iter().take(order).cloned().collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Taylor product. A coefficient is kept when every term feeding it is
    /// known or multiplied by a known zero.
    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order() + other.valuation()).min(other.order() + self.valuation());
        let mut out = vec![S::zero(); order];
        for (i, a) in self.coeffs.iter().enumerate().take(order) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Self { coeffs: out }
    }

    /// `a'`, order `M − 1`.
    pub fn derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a.clone() * S::from_i64(k as i64))
                .collect(),
        }
    }

    /// `∫_base^x a(t) dt`, order `M + 1`. The constant uses the truncated
    /// Taylor sum at `base`.
    pub fn antiderivative(&self, base: &S) -> Self {
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        coeffs.push(S::zero());
        for (k, a) in self.coeffs.iter().enumerate() {
            coeffs.push(a.clone() / S::from_i64(k as i64 + 1));
        }
        if !base.is_zero() {
            let mut at = S::zero();
            for c in coeffs.iter().rev() {
                at = at * base.clone() + c.clone();
            }
            coeffs[0] = -at;
        }
        Self { coeffs }
    }

    /// Horner evaluation of the truncated Taylor polynomial.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn convert<T: Scalar>(&self) -> SlowSeries<T> {
        SlowSeries {
            coeffs: self.coeffs.iter().map(dacx_num::scalar::convert).collect(),
        }
    }
}

/// `S a`: coefficients `a_{ν+1}`, order `M − 1`.
pub fn slow_shift<S: Scalar>(a: &SlowSeries<S>) -> Result<SlowSeries<S>, CoreError> {
    a.shift()
}

/// `T g = X g − g_1`: coefficients `g_{ν+1}`, order `M − 1`.
pub fn fast_shift<S: Scalar>(g: &FastTail<S>) -> Result<FastTail<S>, CoreError> {
    if g.order() == 0 {
        return Err(CoreError::Empty("fast shift of an order-0 tail"));
    }
    Ok(g.shift())
}

/// First nonzero tail index (1-based), or `M + 1` when the tail vanishes.
pub(crate) fn tail_valuation<S: Scalar>(g: &FastTail<S>) -> usize {
    g.coeffs
        .iter()
        .position(|c| !c.is_zero())
        .map_or(g.order() + 1, |i| i + 1)
}

/// Tail product; the order is `min(M_g + v_h, M_h + v_g)`.
pub(crate) fn tail_mul<S: Scalar>(g: &FastTail<S>, h: &FastTail<S>) -> FastTail<S> {
    let order = (g.order() + tail_valuation(h)).min(h.order() + tail_valuation(g));
    let mut out = vec![S::zero(); order];
    for (i, a) in g.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in h.coeffs.iter().enumerate() {
            // X^{−(i+1)} X^{−(j+1)} lands in slot i + j + 1.
            let k = i + j + 1;
            if k >= order {
                break;
            }
            if !b.is_zero() {
                out[k] = out[k].clone() + a.clone() * b.clone();
            }
        }
    }
    FastTail::new(out)
}

/// Fast coefficient: asymptotic tail, optional evaluable expression, and a
/// polynomial part used only by inner expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct FastCoefficient<S> {
    pub tail: FastTail<S>,
    pub expr: Option<FastExpr<S>>,
    /// Coefficients of `X^0..X^d`.
    pub poly: Vec<S>,
}

impl<S: Scalar> FastCoefficient<S> {
    /// The zero function, with tail order `order`.
    pub fn zero(order: usize) -> Self {
        Self {
            tail: FastTail::zeros(order),
            expr: Some(FastExpr::Zero),
            poly: Vec::new(),
        }
    }

    /// Tail-only coefficient (not evaluable).
    pub fn from_tail(tail: FastTail<S>) -> Self {
        Self {
            tail,
            expr: None,
            poly: Vec::new(),
        }
    }

    /// Coefficient of a decaying expression with its tail to order `order`.
    pub fn from_expr(expr: FastExpr<S>, order: usize) -> Result<Self, CoreError> {
        let a = expr.asymptotic(order)?;
        if a.poly.iter().any(|c| !c.is_zero()) {
            return Err(CoreError::Precondition(format!(
                "fast coefficient {expr} does not decay at infinity"
            )));
        }
        Ok(Self {
            tail: a.tail,
            expr: Some(expr),
            poly: Vec::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.tail.order()
    }

    /// Zero as formal data: tail and polynomial part vanish. Expressions are not inspected.
    pub fn is_zero(&self) -> bool {
        self.tail.is_zero() && self.poly.iter().all(|c| c.is_zero())
    }

    /// Formally zero and, when an expression is present, structurally zero too.
    pub fn is_identically_zero(&self) -> bool {
        self.is_zero() && self.expr.as_ref().is_none_or(|e| e.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.poly.len().max(other.poly.len());
        let poly = (0..n)
            .map(|k| {
                self.poly.get(k).cloned().unwrap_or_else(S::zero)
                    + other.poly.get(k).cloned().unwrap_or_else(S::zero)
            })
            .collect();
        let expr = match (&self.expr, &other.expr) {
            (Some(a), Some(b)) => Some(a.clone().add(b.clone())),
            _ => None,
        };
        Self {
            tail: self.tail.add(&other.tail),
            expr,
            poly,
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            tail: self.tail.scale(c),
            expr: self.expr.clone().map(|e| e.scale(c.clone())),
            poly: self.poly.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            tail: self.tail.truncate(order),
            expr: self.expr.clone(),
            poly: self.poly.clone(),
        }
    }

    /// Value at `X` including the polynomial part; needs an expression
    /// unless the coefficient is identically zero.
    pub fn eval(&self, x: f64, cfg: &QuadConfig) -> Result<f64, CoreError> {
        let poly: f64 = self
            .poly
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64());
        match &self.expr {
            Some(e) => Ok(poly + e.eval(x, cfg)?),
            None if self.tail.is_zero() => Ok(poly),
            None => Err(CoreError::NotEvaluable),
        }
    }

    pub fn convert<T: Scalar>(&self) -> FastCoefficient<T> {
        FastCoefficient {
            tail: FastTail::new(
                self.tail
                    .coeffs
                    .iter()
                    .map(dacx_num::scalar::convert)
                    .collect(),
            ),
            expr: self.expr.as_ref().map(|e| e.convert()),
            poly: self.poly.iter().map(dacx_num::scalar::convert).collect(),
        }
    }
}

/// One η-level: slow germ plus fast coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<S> {
    pub slow: SlowSeries<S>,
    pub fast: FastCoefficient<S>,
}

impl<S: Scalar> Term<S> {
    pub fn zero(order: usize) -> Self {
        Self {
            slow: SlowSeries::zeros(order),
            fast: FastCoefficient::zero(order),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.slow.is_zero() && self.fast.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            slow: self.slow.add(&other.slow),
            fast: self.fast.add(&other.fast),
        }
    }

    fn scale(&self, c: &S) -> Self {
        Self {
            slow: self.slow.scale(c),
            fast: self.fast.scale(c),
        }
    }
}

/// Truncated combined series with `η^p = ε`.
///
/// Each level carries its own slow and fast truncation orders; products
/// lower them as mixed slow×fast terms consume Taylor and tail slots.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedSeries<S> {
    pub p: u32,
    pub terms: Vec<Term<S>>,
}

impl<S: Scalar> CombinedSeries<S> {
    pub fn new(p: u32, terms: Vec<Term<S>>) -> Result<Self, CoreError> {
        if p == 0 {
            return Err(CoreError::Config("root order p must be at least 1".into()));
        }
        Ok(Self { p, terms })
    }

    /// `N` levels of zeros with both orders `order`.
    pub fn zero(p: u32, levels: usize, order: usize) -> Self {
        Self {
            p,
            terms: (0..levels).map(|_| Term::zero(order)).collect(),
        }
    }

    /// The constant 1.
    pub fn one(p: u32, levels: usize, order: usize) -> Self {
        let mut s = Self::zero(p, levels, order);
        if let Some(t) = s.terms.first_mut() {
            t.slow = SlowSeries::monomial(0, order);
        }
        s
    }

    /// Slow-only series from per-level Taylor data; fast parts are zero of order `fast_order`.
    pub fn from_slow(p: u32, levels: Vec<Vec<S>>, fast_order: usize) -> Self {
        Self {
            p,
            terms: levels
                .into_iter()
                .map(|a| Term {
                    slow: SlowSeries::new(a),
                    fast: FastCoefficient::zero(fast_order),
                })
                .collect(),
        }
    }

    /// Number of levels `N`.
    pub fn eta_order(&self) -> usize {
        self.terms.len()
    }

    pub fn slow_orders(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.slow.order()).collect()
    }

    pub fn fast_orders(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.fast.order()).collect()
    }

    pub fn truncate_levels(&self, levels: usize) -> Self {
        Self {
            p: self.p,
            terms: self.terms.iter().take(levels).cloned().collect(),
        }
    }

    pub(crate) fn check_p(&self, other: &Self) -> Result<(), CoreError> {
        if self.p != other.p {
            return Err(CoreError::PMismatch {
                left: self.p,
                right: other.p,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_p(other)?;
        Ok(Self {
            p: self.p,
            terms: self
                .terms
                .iter()
                .zip(&other.terms)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CoreError> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            p: self.p,
            terms: self.terms.iter().map(|t| t.scale(c)).collect(),
        }
    }

    /// Multiplies by `η^k`: `k` exactly-zero levels are prepended.
    pub fn shift_eta(&self, k: usize) -> Self {
        let (ms, mf) = self
            .terms
            .first()
            .map_or((0, 0), |t| (t.slow.order(), t.fast.order()));
        let mut terms: Vec<Term<S>> = (0..k)
            .map(|_| Term {
                slow: SlowSeries::zeros(ms),
                fast: FastCoefficient::zero(mf),
            })
            .collect();
        terms.extend(self.terms.iter().cloned());
        Self { p: self.p, terms }
    }

    /// Coefficientwise agreement on the common levels and orders.
    pub fn agrees_with(&self, other: &Self, tol: f64) -> bool {
        self.terms.iter().zip(&other.terms).all(|(a, b)| {
            let slow = a
                .slow
                .coeffs
                .iter()
                .zip(&b.slow.coeffs)
                .all(|(x, y)| x.close_to(y, tol));
            let fast = a
                .fast
                .tail
                .coeffs
                .iter()
                .zip(&b.fast.tail.coeffs)
                .all(|(x, y)| x.close_to(y, tol));
            slow && fast
        })
    }

    /// `a_n(x) + g_n(x/η)` for every level, without the `η^n` factor.
    pub fn level_values(&self, x: f64, eta: f64, cfg: &QuadConfig) -> Result<Vec<f64>, CoreError> {
        let big_x = x / eta;
        self.terms
            .iter()
            .map(|t| Ok(t.slow.eval(x) + t.fast.eval(big_x, cfg)?))
            .collect()
    }

    /// Partial sum over the first `levels` levels.
    pub fn partial_sum(
        &self,
        x: f64,
        eta: f64,
        levels: usize,
        cfg: &QuadConfig,
    ) -> Result<f64, CoreError> {
        if levels > self.eta_order() {
            return Err(CoreError::Precondition(format!(
                "partial sum of {levels} levels requested from a series with {}",
                self.eta_order()
            )));
        }
        let vals = self.truncate_levels(levels).level_values(x, eta, cfg)?;
        Ok(vals.iter().rev().fold(0.0, |acc, v| acc * eta + v))
    }

    pub fn convert<T: Scalar>(&self) -> CombinedSeries<T> {
        CombinedSeries {
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    slow: t.slow.convert(),
                    fast: t.fast.convert(),
                })
                .collect(),
        }
    }
}

/// Smallest `n` with a nonzero slow or fast coefficient; `N` if none.
pub fn valuation<S: Scalar>(y: &CombinedSeries<S>) -> usize {
    y.terms
        .iter()
        .position(|t| !t.is_zero())
        .unwrap_or(y.eta_order())
}

/// Ultrametric distance `2^{−val(y1 − y2)}`.
pub fn distance<S: Scalar>(
    y1: &CombinedSeries<S>,
    y2: &CombinedSeries<S>,
) -> Result<f64, CoreError> {
    let d = y1.sub(y2)?;
    Ok((-(valuation(&d) as f64)).exp2())
}
