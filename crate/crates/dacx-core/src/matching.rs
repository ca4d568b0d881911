//! Outer and inner expansions of a combined series, and the converse
//! reconstruction from a compatible pair.
//!
//! Outer: `c_n(x) = a_n(x) + Σ_{l<n} g_{l,n−l} x^{l−n}`.
//! Inner: `h_n(X) = g_n(X) + Σ_{l≤n} a_{n−l,l} X^l`.
//! Writing `c_n = Σ c_{nm} x^m` and `h_n ~ Σ z_{nm} X^{−m}`, both describe the
//! same double series exactly when `c_{nm} = z_{n+m,−m}`.

use dacx_fastfn::FastTail;
use dacx_num::Scalar;

use crate::series::{CombinedSeries, FastCoefficient, SlowSeries, Term};
use crate::CoreError;

/// Relative tolerance for the compatibility check on floating-point inputs.
pub const MATCH_TOL: f64 = 1e-10;

/// Laurent germ `Σ_{k=1}^{n} c_{n,−k} x^{−k} + Σ_{m≥0} c_{nm} x^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentCoeff<S> {
    /// Coefficients of `x^{−1}, x^{−2}, …`.
    pub polar: Vec<S>,
    pub regular: SlowSeries<S>,
}

impl<S: Scalar> LaurentCoeff<S> {
    /// `c_m`, or `None` past the stored range.
    pub fn coeff(&self, m: i64) -> Option<S> {
        if m >= 0 {
            self.regular.coeffs.get(m as usize).cloned()
        } else {
            Some(
                self.polar
                    .get((-m - 1) as usize)
                    .cloned()
                    .unwrap_or_else(S::zero),
            )
        }
    }

    /// Highest pole order with a nonzero coefficient.
    pub fn pole_order(&self) -> usize {
        self.polar
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1)
    }
}

/// Outer expansion `Σ c_n(x) η^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeq<S> {
    pub terms: Vec<LaurentCoeff<S>>,
}

/// Inner expansion `Σ h_n(X) η^n`; `h_n` has polynomial part of degree ≤ n.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSeq<S> {
    pub p: u32,
    pub terms: Vec<FastCoefficient<S>>,
}

impl<S: Scalar> InnerSeq<S> {
    /// `z_{nm}` (coefficient of `X^{−m}` in `h_n`), or `None` if not stored.
    pub fn z(&self, n: usize, m: i64) -> Option<S> {
        let h = self.terms.get(n)?;
        if m <= 0 {
            Some(h.poly.get((-m) as usize).cloned().unwrap_or_else(S::zero))
        } else if (m as usize) <= h.tail.order() {
            Some(h.tail.get(m as usize))
        } else {
            None
        }
    }

    /// Polynomial degree of `h_n`, ignoring trailing zeros.
    pub fn poly_degree(&self, n: usize) -> Option<usize> {
        self.terms[n].poly.iter().rposition(|c| !c.is_zero())
    }
}

/// Outer expansion. Levels whose polar part would need tail coefficients
/// beyond the stored orders are dropped.
pub fn extract_outer<S: Scalar>(y: &CombinedSeries<S>) -> LaurentSeq<S> {
    let mut terms = Vec::new();
    for (n, t) in y.terms.iter().enumerate() {
        if (1..=n).any(|k| y.terms[n - k].fast.order() < k) {
            break;
        }
        let polar = (1..=n).map(|k| y.terms[n - k].fast.tail.get(k)).collect();
        terms.push(LaurentCoeff {
            polar,
            regular: t.slow.clone(),
        });
    }
    LaurentSeq { terms }
}

/// Inner expansion. Levels whose polynomial part would need Taylor
/// coefficients beyond the stored orders are dropped.
pub fn extract_inner<S: Scalar>(y: &CombinedSeries<S>) -> InnerSeq<S> {
    let mut terms = Vec::new();
    for (n, t) in y.terms.iter().enumerate() {
        if (0..=n).any(|l| y.terms[n - l].slow.order() <= l) {
            break;
        }
        let poly = (0..=n)
            .map(|l| y.terms[n - l].slow.coeffs[l].clone())
            .collect();
        terms.push(FastCoefficient {
            tail: t.fast.tail.clone(),
            expr: t.fast.expr.clone(),
            poly,
        });
    }
    InnerSeq { p: y.p, terms }
}

/// Worst violation of `c_{nm} = z_{n+m,−m}` over the overlap, as
/// `((n, m), |difference|, scale)`.
pub fn matching_defect<S: Scalar>(
    outer: &LaurentSeq<S>,
    inner: &InnerSeq<S>,
) -> Option<((usize, i64), f64, f64)> {
    let mut worst: Option<((usize, i64), f64, f64)> = None;
    for (n, c) in outer.terms.iter().enumerate() {
        let top = c.regular.order() as i64;
        for m in -(n as i64)..top {
            let k = n as i64 + m;
            if k < 0 || k as usize >= inner.terms.len() {
                continue;
            }
            let (Some(cv), Some(zv)) = (c.coeff(m), inner.z(k as usize, -m)) else {
                continue;
            };
            let d = cv.clone() - zv.clone();
            if d.is_zero() {
                continue;
            }
            let dev = d.magnitude();
            let scale = 1f64.max(cv.magnitude()).max(zv.magnitude());
            if worst.is_none_or(|(_, w, s)| dev / scale > w / s) {
                worst = Some(((n, m), dev, scale));
            }
        }
    }
    worst
}

/// Combined series from compatible outer and inner expansions:
/// `a_n` is the regular part of `c_n`, `g_n` the decaying part of `h_n`.
pub fn match_reconstruct<S: Scalar>(
    outer: &LaurentSeq<S>,
    inner: &InnerSeq<S>,
) -> Result<CombinedSeries<S>, CoreError> {
    for (n, c) in outer.terms.iter().enumerate() {
        if c.pole_order() > n {
            return Err(CoreError::Precondition(format!(
                "outer c_{n} has a pole of order {} > {n}",
                c.pole_order()
            )));
        }
    }
    for n in 0..inner.terms.len() {
        if let Some(d) = inner.poly_degree(n) {
            if d > n {
                return Err(CoreError::Precondition(format!(
                    "inner h_{n} has polynomial degree {d} > {n}"
                )));
            }
        }
    }
    if let Some(((n, m), dev, scale)) = matching_defect(outer, inner) {
        if S::EXACT || dev > MATCH_TOL * scale {
            return Err(CoreError::MatchingInconsistency {
                n,
                m,
                deviation: dev,
            });
        }
    }
    let levels = outer.terms.len().min(inner.terms.len());
    let terms = (0..levels)
        .map(|n| Term {
            slow: outer.terms[n].regular.clone(),
            fast: FastCoefficient {
                tail: FastTail::new(inner.terms[n].tail.coeffs.clone()),
                expr: inner.terms[n].expr.clone(),
                poly: Vec::new(),
            },
        })
        .collect();
    Ok(CombinedSeries { p: inner.p, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use dacx_fastfn::Ray;
    use dacx_num::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn eta_u(levels: usize, order: usize) -> CombinedSeries<Rational> {
        let mut y = CombinedSeries::zero(2, levels, order);
        y.terms[1].fast = FastCoefficient::from_tail(dacx_fastfn::u_tail(2, 1, Ray::Minus, order));
        y
    }

    #[test]
    fn eta_u_poles_in_outer_expansion() {
        let o = extract_outer(&eta_u(5, 6));
        assert_eq!(o.terms.len(), 5);
        assert_eq!(o.terms[2].coeff(-1), Some(q(-1, 2)));
        assert_eq!(o.terms[4].coeff(-3), Some(q(1, 4)));
        assert_eq!(o.terms[3].coeff(-2), Some(q(0, 1)));
    }

    #[test]
    fn slow_only_inner_is_rediagonalized() {
        let y = CombinedSeries::from_slow(
            2,
            vec![
                vec![q(1, 1), q(2, 1), q(3, 1)],
                vec![q(4, 1), q(5, 1), q(6, 1)],
            ],
            3,
        );
        let i = extract_inner(&y);
        assert_eq!(i.terms[0].poly, vec![q(1, 1)]);
        // h_1 = a_{1,0} + a_{0,1} X
        assert_eq!(i.terms[1].poly, vec![q(4, 1), q(2, 1)]);
        let o = extract_outer(&y);
        assert!(match_reconstruct(&o, &i)
            .unwrap()
            .terms
            .iter()
            .all(|t| t.fast.is_zero()));
    }

    #[test]
    fn round_trip_and_forced_failure() {
        let mut y = eta_u(4, 5);
        y.terms[0].slow = SlowSeries::new(vec![q(1, 1), q(-1, 3), q(0, 1), q(2, 1), q(1, 1)]);
        let (o, i) = (extract_outer(&y), extract_inner(&y));
        assert!(matching_defect(&o, &i).is_none());
        assert_eq!(match_reconstruct(&o, &i).unwrap(), y);
        let mut bad = o.clone();
        bad.terms[3].polar[1] = q(7, 1);
        match match_reconstruct(&bad, &i) {
            Err(CoreError::MatchingInconsistency { n, m, .. }) => assert_eq!((n, m), (3, -2)),
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }
}
