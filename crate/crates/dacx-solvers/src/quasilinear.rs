//! Combined expansion of `εy' = p x^{p−1} y + εP(x, y, ε)` at the turning point.
//!
//! Outer: `y ~ Σ v_n(x) ε^n` with `v_0 = 0` and
//! `v_{n+1} = (v_n' − q_n)/(p x^{p−1})`, `q_n = [ε^n] P(x, Σ v_k ε^k, ε)`.
//! Inner: `y ~ Σ Y_n(X) η^n` with `Y_0 = 0`, `Y_n = J^{ray} G_n` and
//! `G_n = [η^{n−1}] P(ηX, Σ Y_k η^k, η^p)`.
//! The combined series keeps the regular part of the outer coefficients and
//! the decaying part of the inner ones.

use dacx_core::{
    match_reconstruct, CombinedSeries, FastCoefficient, InnerSeq, LaurentCoeff, LaurentSeq,
    SlowSeries,
};
use dacx_fastfn::{j_apply, FastExpr, Ray};
use dacx_num::Scalar;

use crate::spec::{EquationSpec, TrivariateFunction};
use crate::SolverError;

/// Truncated Laurent series `Σ_{k ≥ low} c_k x^k`, known below `top`
/// (`None`: exact, all further coefficients vanish).
#[derive(Debug, Clone)]
struct Laurent<S> {
    low: i64,
    coeffs: Vec<S>,
    top: Option<i64>,
}

fn min_top(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

impl<S: Scalar> Laurent<S> {
    fn zero() -> Self {
        Self {
            low: 0,
            coeffs: Vec::new(),
            top: None,
        }
    }

    fn one() -> Self {
        Self {
            low: 0,
            coeffs: vec![S::one()],
            top: None,
        }
    }

    fn end(&self) -> i64 {
        self.low + self.coeffs.len() as i64
    }

    fn coeff(&self, k: i64) -> S {
        if k < self.low || k >= self.end() {
            S::zero()
        } else {
            self.coeffs[(k - self.low) as usize].clone()
        }
    }

    /// Lowest exponent with a nonzero coefficient; `top` (or `+∞`) if none.
    fn valuation(&self) -> Option<i64> {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Some(self.low + i as i64),
            None => self.top,
        }
    }

    fn is_exact_zero(&self) -> bool {
        self.top.is_none() && self.coeffs.iter().all(|c| c.is_zero())
    }

    fn from_range(low: i64, end: i64, top: Option<i64>, f: impl Fn(i64) -> S) -> Self {
        let end = top.map_or(end, |t| t.min(end.max(t)));
        let end = end.max(low);
        Self {
            low,
            coeffs: (low..end).map(f).collect(),
            top,
        }
    }

    fn add(&self, other: &Self) -> Self {
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let top = min_top(self.top, other.top);
        let end = self.end().max(other.end());
        Self::from_range(low, top.unwrap_or(end), top, |k| {
            self.coeff(k) + other.coeff(k)
        })
    }

    fn scale(&self, c: &S) -> Self {
        Self {
            low: self.low,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
            top: self.top,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let (va, vb) = (self.valuation(), other.valuation());
        let top = match (self.top, other.top) {
            (None, None) => None,
            (Some(t), None) => Some(t + vb.unwrap_or(0)),
            (None, Some(t)) => Some(t + va.unwrap_or(0)),
            (Some(ta), Some(tb)) => Some((ta + vb.unwrap_or(tb)).min(tb + va.unwrap_or(ta))),
        };
        let low = self.low + other.low;
        let end = top.unwrap_or(self.end() + other.end());
        let mut out = vec![S::zero(); (end - low).max(0) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= out.len() {
                    break;
                }
                if !b.is_zero() {
                    out[k] = out[k].clone() + a.clone() * b.clone();
                }
            }
        }
        Self {
            low,
            coeffs: out,
            top,
        }
    }

    fn derivative(&self) -> Self {
        Self {
            low: self.low - 1,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.clone() * S::from_i64(self.low + i as i64))
                .collect(),
            top: self.top.map(|t| t - 1),
        }
    }

    /// Multiplication by `x^s`.
    fn shift(&self, s: i64) -> Self {
        Self {
            low: self.low + s,
            coeffs: self.coeffs.clone(),
            top: self.top.map(|t| t + s),
        }
    }

    fn pole_order(&self) -> usize {
        (self.low..0)
            .find(|&k| !self.coeff(k).is_zero())
            .map_or(0, |k| (-k) as usize)
    }
}

/// `P_{·jk}(x)` as a Laurent series, or `None` when the column is missing.
fn column<S: Scalar>(pfun: &TrivariateFunction, j: usize, k: usize) -> Option<Laurent<S>> {
    let (ox, oy, oe) = pfun.orders();
    if (j >= oy || k >= oe) && !pfun.polynomial {
        return None;
    }
    let coeffs: Vec<S> = (0..ox)
        .map(|i| pfun.coeff(i, j, k).unwrap_or_else(S::zero))
        .collect();
    Some(Laurent {
        low: 0,
        coeffs,
        top: if pfun.polynomial {
            None
        } else {
            Some(ox as i64)
        },
    })
}

/// Outer coefficients `v_0..v_{count−1}` as Laurent germs with regular parts
/// of order `order`.
pub fn outer_sequence<S: Scalar>(
    p: u32,
    pfun: &TrivariateFunction,
    count: usize,
    order: usize,
) -> Result<Vec<LaurentCoeff<S>>, SolverError> {
    outer_core(p, pfun, count, order, 0)
}

/// Outer coefficients for `εy' = p x^{p−1} y + R(x, y, ε)` with `R` not divisible by `ε`.
///
/// `R(x, 0, 0)` and `∂_y R(x, 0, 0)` must vanish, so that `v_0 = 0` and
/// `v_{n+1} = (v_n' − [ε^{n+1}]R)/(p x^{p−1})` only involves `v_0..v_n`.
pub fn outer_sequence_unscaled<S: Scalar>(
    p: u32,
    rfun: &TrivariateFunction,
    count: usize,
    order: usize,
) -> Result<Vec<LaurentCoeff<S>>, SolverError> {
    for j in 0..2 {
        let col = column::<S>(rfun, j, 0).ok_or_else(|| SolverError::InsufficientTaylor {
            what: format!("{} at y^{j} ε^0", rfun.label),
            need: 2,
            got: 0,
        })?;
        if !col.coeffs.iter().all(|c| c.is_zero()) {
            return Err(SolverError::Config(format!(
                "{} has a y^{j} term at ε = 0; the outer recursion needs R(x, y, 0) = O(y²)",
                rfun.label
            )));
        }
    }
    outer_core(p, rfun, count, order, 1)
}

/// Fails when `v_k` has a pole deeper than its level `pk`.
pub fn check_outer_poles<S: Scalar>(p: u32, outer: &[LaurentCoeff<S>]) -> Result<(), SolverError> {
    for (k, v) in outer.iter().enumerate() {
        let level = p as usize * k;
        if v.polar.len() > level {
            return Err(SolverError::Truncation(format!(
                "outer coefficient v_{k} has a pole of order {} at level {level}; poles deeper than the level are \
                 incompatible with a combined expansion",
                v.polar.len()
            )));
        }
    }
    Ok(())
}

/// `q_n = [ε^{n+shift}] F(x, Σ v_k ε^k, ε)` with `v_{n+1}` still unknown (taken as zero).
fn outer_core<S: Scalar>(
    p: u32,
    pfun: &TrivariateFunction,
    count: usize,
    order: usize,
    shift: usize,
) -> Result<Vec<LaurentCoeff<S>>, SolverError> {
    let pi = p as i64;
    let inv_p = S::one() / S::from_i64(pi);
    let mut v: Vec<Laurent<S>> = vec![Laurent::zero()];
    let size = count + shift;
    // pw[j][m] = [ε^m] (Σ_{l≥1} v_l ε^l)^j over the known v_l
    let mut pw: Vec<Vec<Laurent<S>>> = vec![vec![Laurent::zero(); size]; size];
    if size > 0 {
        pw[0][0] = Laurent::one();
    }
    for n in 0..count.saturating_sub(1) {
        let top = n + shift;
        for m in 1..=top {
            for j in 1..=m {
                let mut acc = Laurent::zero();
                for l in 1..=(m.min(n)) {
                    acc = acc.add(&v[l].mul(&pw[j - 1][m - l]));
                }
                pw[j][m] = acc;
            }
        }
        let mut q = Laurent::zero();
        for k in 0..=top {
            for j in 0..=(top - k) {
                let y_part = &pw[j][top - k];
                if y_part.is_exact_zero() {
                    continue;
                }
                let col =
                    column::<S>(pfun, j, k).ok_or_else(|| SolverError::InsufficientTaylor {
                        what: format!("{} at y^{j} ε^{k}", pfun.label),
                        need: j.max(k) + 1,
                        got: {
                            let (_, oy, oe) = pfun.orders();
                            if j >= oy {
                                oy
                            } else {
                                oe
                            }
                        },
                    })?;
                q = q.add(&col.mul(y_part));
            }
        }
        let next = v[n]
            .derivative()
            .add(&q.scale(&-S::one()))
            .shift(-(pi - 1))
            .scale(&inv_p);
        v.push(next);
    }
    v.truncate(count);
    v.iter()
        .enumerate()
        .map(|(k, l)| {
            let known = l.top.map_or(usize::MAX, |t| t.max(0) as usize);
            if known < order {
                let (ox, _, _) = pfun.orders();
                return Err(SolverError::InsufficientTaylor {
                    what: format!("{} along x for v_{k}", pfun.label),
                    need: ox + order - known,
                    got: ox,
                });
            }
            let poles = l.pole_order();
            Ok(LaurentCoeff {
                polar: (1..=poles as i64).map(|m| l.coeff(-m)).collect(),
                regular: SlowSeries::new((0..order as i64).map(|m| l.coeff(m)).collect()),
            })
        })
        .collect()
}

/// Inner forcings `G_n` and solutions `Y_n = J^{ray} G_n` for `n < levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution<S> {
    pub forcing: Vec<FastExpr<S>>,
    pub solutions: Vec<FastExpr<S>>,
}

pub fn inner_sequence<S: Scalar>(
    p: u32,
    pfun: &TrivariateFunction,
    ray: Ray,
    levels: usize,
) -> Result<InnerSolution<S>, SolverError> {
    let pu = p as usize;
    let mut ys: Vec<FastExpr<S>> = vec![FastExpr::Zero];
    let mut gs: Vec<FastExpr<S>> = vec![FastExpr::Zero];
    // pw[j][m] = [η^m] (Σ_{l≥1} Y_l η^l)^j
    let mut pw: Vec<Vec<FastExpr<S>>> = vec![vec![FastExpr::Zero; levels]; levels];
    if levels > 0 {
        pw[0][0] = FastExpr::Monomial(0);
    }
    for n in 1..levels {
        let m_new = n - 1;
        for j in 1..=m_new {
            let terms = (1..=m_new)
                .map(|l| FastExpr::product(vec![ys[l].clone(), pw[j - 1][m_new - l].clone()]))
                .collect();
            pw[j][m_new] = FastExpr::sum(terms);
        }
        let mut terms = Vec::new();
        for k in 0..=m_new / pu {
            for i in 0..=(m_new - pu * k) {
                let m = m_new - pu * k - i;
                for (j, row) in pw.iter().enumerate().take(m + 1) {
                    let y_part = &row[m];
                    if y_part.is_zero() {
                        continue;
                    }
                    let c: S = pfun.require(i, j, k)?;
                    if c.is_zero() {
                        continue;
                    }
                    terms.push(
                        FastExpr::product(vec![FastExpr::Monomial(i as i32), y_part.clone()])
                            .scale(c),
                    );
                }
            }
        }
        let g = FastExpr::sum(terms);
        ys.push(j_apply(ray, p, g.clone()));
        gs.push(g);
    }
    ys.truncate(levels);
    gs.truncate(levels);
    Ok(InnerSolution {
        forcing: gs,
        solutions: ys,
    })
}

/// Combined expansion with `levels` levels of the solution bounded along `ray`;
/// slow parts and tails have order `order`.
pub fn quasilinear_dac<S: Scalar>(
    spec: &EquationSpec,
    ray: Ray,
    levels: usize,
    order: usize,
) -> Result<CombinedSeries<S>, SolverError> {
    let (p, pfun) = match spec {
        EquationSpec::QuasiLinear { p, pfun } => (*p, pfun.clone()),
        EquationSpec::LinearModel { p, g } => (*p, TrivariateFunction::from_slow(g)),
        other => {
            return Err(SolverError::Config(format!(
                "quasilinear_dac needs a quasilinear spec, got {}",
                other.name()
            )))
        }
    };
    if p == 0 {
        return Err(SolverError::Config("p must be at least 1".into()));
    }
    if ray == Ray::Minus && p % 2 == 1 {
        return Err(SolverError::Config(format!(
            "J^- is undefined for odd p = {p}; use the + ray"
        )));
    }
    let pu = p as usize;
    let count = levels.div_ceil(pu).max(1);
    let outer = outer_sequence::<S>(p, &pfun, count, order)?;
    check_outer_poles(p, &outer)?;
    let mut lterms = Vec::with_capacity(levels);
    for n in 0..levels {
        if n % pu == 0 {
            let v = &outer[n / pu];
            let mut polar = v.polar.clone();
            polar.resize(n, S::zero());
            lterms.push(LaurentCoeff {
                polar,
                regular: v.regular.clone(),
            });
        } else {
            lterms.push(LaurentCoeff {
                polar: vec![S::zero(); n],
                regular: SlowSeries::zeros(order),
            });
        }
    }
    let inner = inner_sequence::<S>(p, &pfun, ray, levels)?;
    let mut iterms = Vec::with_capacity(levels);
    for y in &inner.solutions {
        let a = y.asymptotic(order)?;
        let growth: Vec<FastExpr<S>> = a
            .poly
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| FastExpr::Monomial(k as i32).scale(-c.clone()))
            .collect();
        let mut parts = vec![y.clone()];
        parts.extend(growth);
        iterms.push(FastCoefficient {
            tail: a.tail,
            expr: Some(FastExpr::sum(parts)),
            poly: a.poly,
        });
    }
    let y = match_reconstruct(
        &LaurentSeq { terms: lterms },
        &InnerSeq { p, terms: iterms },
    )?;
    Ok(y)
}
