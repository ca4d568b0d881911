//! Termwise differentiation and integration.

use std::sync::Arc;

use dacx_fastfn::{Asymptotic, FastExpr, FastTail, QuadConfig, Ray};
use dacx_num::Scalar;

use crate::series::{CombinedSeries, FastCoefficient, Term};
use crate::CoreError;

/// `d/dx` of a series whose level-0 fast part vanishes.
///
/// Level `n` of the result is `a_n' + g_{n+1}'`; the last level is dropped
/// because `g_N` is not stored.
pub fn differentiate<S: Scalar>(y: &CombinedSeries<S>) -> Result<CombinedSeries<S>, CoreError> {
    if let Some(t) = y.terms.first() {
        if !t.fast.is_identically_zero() {
            return Err(CoreError::Precondition(
                "level-0 fast part is nonzero; only η·d/dx is defined for such series".into(),
            ));
        }
    }
    let n = y.eta_order().saturating_sub(1);
    let terms = (0..n)
        .map(|k| {
            let g = &y.terms[k + 1].fast;
            let tail = Asymptotic::from_tail(g.tail.clone()).derivative().tail;
            Term {
                slow: y.terms[k].slow.derivative(),
                fast: FastCoefficient {
                    tail,
                    expr: g.expr.clone().map(|e| e.derivative()),
                    poly: Vec::new(),
                },
            }
        })
        .collect();
    Ok(CombinedSeries { p: y.p, terms })
}

/// Antiderivative with a logarithmic part:
/// `∫_r^x y dt ~ η R̂(η)(ℓ(x/η) − ℓ(r/η)) + Ŷ(x) − Ŷ(r)`,
/// `ℓ(X) = (1/p) log(X^p + 1)`, `R̂(η) = Σ_n g_{n,1} η^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogAugmentedSeries<S> {
    /// `Ŷ(x) = A_0(x) + Σ_{n≥1} (A_n(x) + H_{n−1}(x/η)) η^n` with `A_n(r) = 0`.
    pub base: CombinedSeries<S>,
    /// `g_{n,1}` for `n = 0..N−1`, trailing zeros removed.
    pub residue_series: Vec<S>,
    /// Lower limit `r`.
    pub lower: S,
}

impl<S: Scalar> LogAugmentedSeries<S> {
    pub fn has_log(&self) -> bool {
        !self.residue_series.is_empty()
    }

    /// `(1/p) log(X^p + 1)`.
    fn ell(&self, x: f64) -> Result<f64, CoreError> {
        let v = x.powi(self.base.p as i32) + 1.0;
        if v <= 0.0 {
            return Err(CoreError::Domain(format!(
                "log(X^{} + 1) undefined at X = {x}",
                self.base.p
            )));
        }
        Ok(v.ln() / self.base.p as f64)
    }

    /// Definite integral from `r` to `x` using the first `levels` levels.
    pub fn eval(
        &self,
        x: f64,
        eta: f64,
        levels: usize,
        cfg: &QuadConfig,
    ) -> Result<f64, CoreError> {
        let r = self.lower.to_f64();
        let mut v = self.base.partial_sum(x, eta, levels, cfg)?
            - self.base.partial_sum(r, eta, levels, cfg)?;
        if self.has_log() {
            let dl = self.ell(x / eta)? - self.ell(r / eta)?;
            // Level n + 1 carries g_{n,1}.
            let mut pw = eta;
            for g in self.residue_series.iter().take(levels.saturating_sub(1)) {
                v += pw * g.to_f64() * dl;
                pw *= eta;
            }
        }
        Ok(v)
    }
}

/// Termwise antiderivative from `base`, fast parts normalized to vanish at
/// the end of `ray`.
pub fn integrate<S: Scalar>(y: &CombinedSeries<S>, base: &S, ray: Ray) -> LogAugmentedSeries<S> {
    let p = y.p;
    let n = y.eta_order();
    let mut residues: Vec<S> = y.terms.iter().map(|t| t.fast.tail.get(1)).collect();
    while residues.last().is_some_and(|c| c.is_zero()) {
        residues.pop();
    }
    let terms = (0..n)
        .map(|k| {
            let slow = y.terms[k].slow.antiderivative(base);
            let fast = if k == 0 {
                FastCoefficient::zero(slow.order())
            } else {
                antiderivative_fast(&y.terms[k - 1].fast, p, ray)
            };
            Term { slow, fast }
        })
        .collect();
    LogAugmentedSeries {
        base: CombinedSeries { p, terms },
        residue_series: residues,
        lower: base.clone(),
    }
}

/// `H(X) = ∫_{ray}^X (g − g_1 ℓ')`; tail `H_j = −g̃_{j+1}/j`, order `M − 1`.
fn antiderivative_fast<S: Scalar>(g: &FastCoefficient<S>, p: u32, ray: Ray) -> FastCoefficient<S> {
    let g1 = g.tail.get(1);
    let mut shifted = g.tail.clone();
    if !g1.is_zero() {
        // ℓ'(T) = Σ_k (−1)^k T^{−1−kp}
        let mut sign = S::one();
        let mut m = 1;
        while m <= shifted.order() {
            shifted.coeffs[m - 1] = shifted.coeffs[m - 1].clone() - g1.clone() * sign.clone();
            sign = -sign;
            m += p as usize;
        }
    }
    let order = shifted.order().saturating_sub(1);
    let tail = FastTail::new(
        (1..=order)
            .map(|j| -shifted.get(j + 1) / S::from_i64(j as i64))
            .collect(),
    );
    let expr = g.expr.clone().map(|e| {
        let child = if g1.is_zero() {
            e
        } else {
            e.add(FastExpr::LogDeriv { p }.scale(-g1.clone()))
        };
        if child.is_zero() {
            FastExpr::Zero
        } else {
            FastExpr::Integral {
                ray,
                child: Arc::new(child),
            }
        }
    });
    FastCoefficient {
        tail,
        expr,
        poly: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SlowSeries;
    use dacx_num::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn derivative_of_level_one_tail() {
        let mut y = CombinedSeries::<Rational>::zero(2, 2, 2);
        y.terms[1].fast = FastCoefficient::from_tail(FastTail::new(vec![q(3), q(5)]));
        let d = differentiate(&y).unwrap();
        assert_eq!(d.eta_order(), 1);
        assert_eq!(d.terms[0].fast.tail.coeffs, vec![q(0), q(-3), q(-10)]);
    }

    #[test]
    fn nonzero_g0_is_rejected() {
        let mut y = CombinedSeries::<Rational>::zero(2, 2, 2);
        y.terms[0].fast = FastCoefficient::from_tail(FastTail::new(vec![q(1), q(0)]));
        assert!(matches!(differentiate(&y), Err(CoreError::Precondition(_))));
    }

    #[test]
    fn slow_only_integration_has_no_log() {
        let y = CombinedSeries::from_slow(2, vec![vec![q(1), q(2)], vec![q(3), q(0)]], 2);
        let r = integrate(&y, &q(0), Ray::Minus);
        assert!(!r.has_log());
        assert_eq!(
            r.base.terms[0].slow,
            SlowSeries::new(vec![q(0), q(1), q(1)])
        );
        assert!(r.base.terms[1].fast.is_zero());
    }

    #[test]
    fn residue_free_tail_integrates_termwise() {
        let mut y = CombinedSeries::<Rational>::zero(2, 2, 3);
        y.terms[0].fast = FastCoefficient::from_tail(FastTail::new(vec![q(0), q(7), q(0)]));
        let r = integrate(&y, &q(0), Ray::Minus);
        // −∫_X^∞ 7 T^{−2} dT = −7/X
        assert_eq!(r.base.terms[1].fast.tail.coeffs, vec![q(-7), q(0)]);
    }

    #[test]
    fn residue_goes_to_log_series() {
        let mut y = CombinedSeries::<Rational>::zero(2, 2, 4);
        y.terms[1].fast = FastCoefficient::from_tail(FastTail::new(vec![q(1), q(0), q(0), q(0)]));
        let r = integrate(&y, &q(0), Ray::Minus);
        assert_eq!(r.residue_series, vec![q(0), q(1)]);
    }
}
