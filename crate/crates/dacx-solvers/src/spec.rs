//! Problem data: scalar functions with Taylor jets and the equation families.

use std::fmt;
use std::sync::Arc;

use dacx_num::{Rational, Scalar};
use num_traits::Zero;

use crate::SolverError;

pub type Evaluator1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Evaluator3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Relative tolerance of the Taylor-versus-evaluator spot check.
pub const SPOT_CHECK_TOL: f64 = 1e-6;

fn spot_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SPOT_CHECK_TOL * 1f64.max(a.abs()).max(b.abs())
}

/// Five-point central difference.
fn central_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

/// Function of `x` with its Taylor coefficients at 0.
#[derive(Clone)]
pub struct SlowFunction {
    pub label: String,
    /// `g_0, g_1, …`.
    pub taylor: Vec<Rational>,
    /// `true` when every coefficient past `taylor` is known to vanish.
    pub polynomial: bool,
    eval: Evaluator1,
}

impl fmt::Debug for SlowFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlowFunction")
            .field("label", &self.label)
            .field("order", &self.taylor.len())
            .finish()
    }
}

impl SlowFunction {
    pub fn new(label: impl Into<String>, taylor: Vec<Rational>, eval: Evaluator1) -> Self {
        Self {
            label: label.into(),
            taylor,
            polynomial: false,
            eval,
        }
    }

    /// Polynomial `Σ c_k x^k`; its jet is known to every order.
    pub fn polynomial(coeffs: Vec<Rational>) -> Self {
        let f: Vec<f64> = coeffs.iter().map(|c| c.to_f64()).collect();
        let label = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})*x^{k}"))
            .collect::<Vec<_>>()
            .join(" + ");
        Self {
            label: if label.is_empty() { "0".into() } else { label },
            taylor: coeffs,
            polynomial: true,
            eval: Arc::new(move |x| f.iter().rev().fold(0.0, |acc, c| acc * x + c)),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn evaluator(&self) -> Evaluator1 {
        self.eval.clone()
    }

    /// Coefficients `g_0..g_{order−1}`.
    pub fn taylor<S: Scalar>(&self, order: usize) -> Result<Vec<S>, SolverError> {
        if order > self.taylor.len() && !self.polynomial {
            return Err(SolverError::InsufficientTaylor {
                what: self.label.clone(),
                need: order,
                got: self.taylor.len(),
            });
        }
        Ok((0..order)
            .map(|k| {
                self.taylor
                    .get(k)
                    .map_or_else(S::zero, dacx_num::scalar::convert)
            })
            .collect())
    }

    /// Compares `g(0)` and `g'(0)` with the jet.
    pub fn check_consistency(&self) -> Result<(), SolverError> {
        let jet: Vec<f64> = (0..2)
            .map(|k| self.taylor.get(k).map_or(0.0, |c| c.to_f64()))
            .collect();
        let known = self.taylor.len().max(if self.polynomial { 2 } else { 0 });
        let v0 = self.eval(0.0);
        if known >= 1 && !spot_close(v0, jet[0]) {
            return Err(SolverError::Config(format!(
                "{}: value at 0 is {v0} but the jet says {}",
                self.label, jet[0]
            )));
        }
        let d0 = central_difference(|x| self.eval(x), 1e-3);
        if known >= 2 && !spot_close(d0, jet[1]) {
            return Err(SolverError::Config(format!(
                "{}: slope at 0 is {d0} but the jet says {}",
                self.label, jet[1]
            )));
        }
        Ok(())
    }
}

/// Function `P(x, y, ε)` with Taylor coefficients `P_{ijk}` of `x^i y^j ε^k`.
#[derive(Clone)]
pub struct TrivariateFunction {
    pub label: String,
    /// `coeffs[i][j][k]`, a full box of orders `(ox, oy, oe)`.
    pub coeffs: Vec<Vec<Vec<Rational>>>,
    /// `true` when every coefficient outside the box is known to vanish.
    pub polynomial: bool,
    eval: Evaluator3,
}

impl fmt::Debug for TrivariateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrivariateFunction")
            .field("label", &self.label)
            .field("orders", &self.orders())
            .finish()
    }
}

impl TrivariateFunction {
    pub fn new(
        label: impl Into<String>,
        coeffs: Vec<Vec<Vec<Rational>>>,
        polynomial: bool,
        eval: Evaluator3,
    ) -> Result<Self, SolverError> {
        let label = label.into();
        let oy = coeffs.first().map_or(0, |v| v.len());
        let oe = coeffs
            .first()
            .and_then(|v| v.first())
            .map_or(0, |v| v.len());
        if coeffs
            .iter()
            .any(|v| v.len() != oy || v.iter().any(|w| w.len() != oe))
        {
            return Err(SolverError::Config(format!(
                "{label}: Taylor box is ragged"
            )));
        }
        Ok(Self {
            label,
            coeffs,
            polynomial,
            eval,
        })
    }

    /// `P(x, y, ε) = g(x)`.
    pub fn from_slow(g: &SlowFunction) -> Self {
        let e = g.evaluator();
        Self {
            label: g.label.clone(),
            coeffs: g.taylor.iter().map(|c| vec![vec![c.clone()]]).collect(),
            polynomial: g.polynomial,
            eval: Arc::new(move |x, _, _| e(x)),
        }
    }

    pub fn orders(&self) -> (usize, usize, usize) {
        let oy = self.coeffs.first().map_or(0, |v| v.len());
        let oe = self
            .coeffs
            .first()
            .and_then(|v| v.first())
            .map_or(0, |v| v.len());
        (self.coeffs.len(), oy, oe)
    }

    pub fn eval(&self, x: f64, y: f64, eps: f64) -> f64 {
        (self.eval)(x, y, eps)
    }

    /// `P_{ijk}`, zero outside the box for polynomials and `None` otherwise.
    pub fn coeff<S: Scalar>(&self, i: usize, j: usize, k: usize) -> Option<S> {
        match self
            .coeffs
            .get(i)
            .and_then(|v| v.get(j))
            .and_then(|v| v.get(k))
        {
            Some(c) => Some(dacx_num::scalar::convert(c)),
            None if self.polynomial => Some(S::zero()),
            None => None,
        }
    }

    /// `P_{ijk}` or an insufficient-data error.
    pub fn require<S: Scalar>(&self, i: usize, j: usize, k: usize) -> Result<S, SolverError> {
        self.coeff(i, j, k).ok_or_else(|| {
            let (ox, oy, oe) = self.orders();
            SolverError::InsufficientTaylor {
                what: format!("{} at x^{i} y^{j} ε^{k} (box {ox}×{oy}×{oe})", self.label),
                need: i.max(j).max(k) + 1,
                got: if i >= ox {
                    ox
                } else if j >= oy {
                    oy
                } else {
                    oe
                },
            }
        })
    }

    /// Compares `P(0,0,0)`, `∂_x P` and `∂_y P` at the origin with the box.
    pub fn check_consistency(&self) -> Result<(), SolverError> {
        let c = |i, j| self.coeff::<f64>(i, j, 0);
        let checks = [
            ("value", c(0, 0), self.eval(0.0, 0.0, 0.0)),
            (
                "x-slope",
                c(1, 0),
                central_difference(|h| self.eval(h, 0.0, 0.0), 1e-3),
            ),
            (
                "y-slope",
                c(0, 1),
                central_difference(|h| self.eval(0.0, h, 0.0), 1e-3),
            ),
        ];
        for (what, jet, num) in checks {
            if let Some(jet) = jet {
                if !spot_close(num, jet) {
                    return Err(SolverError::Config(format!(
                        "{}: {what} at 0 is {num} but the jet says {jet}",
                        self.label
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Equation families.
#[derive(Debug, Clone)]
pub enum EquationSpec {
    /// `εy' = p x^{p−1} y + εg(x)`.
    LinearModel { p: u32, g: SlowFunction },
    /// `εy' = −2xy + εg(x)`, `y(0) = c(ε) = Σ c_n η^n`.
    LinearRepulsiveAttractive {
        g: SlowFunction,
        c_series: Vec<Rational>,
    },
    /// `εy' = p x^{p−1} y + εg(x) + εα(ε)` with `α` chosen for a bounded solution.
    ControlledLinear { p: u32, g: SlowFunction },
    /// `εy' = p x^{p−1} y + εP(x, y, ε)`.
    QuasiLinear { p: u32, pfun: TrivariateFunction },
    /// `Y' = Y(Y − X)(Y + X) + c`.
    UnionJackInner { c: f64 },
    /// `Z'' − αX^{p−1}Z' + βX^{p−2}Z = 0`.
    ResonancePair {
        alpha: Rational,
        beta: Rational,
        p: u32,
    },
}

impl EquationSpec {
    pub fn p(&self) -> u32 {
        match self {
            EquationSpec::LinearModel { p, .. }
            | EquationSpec::ControlledLinear { p, .. }
            | EquationSpec::QuasiLinear { p, .. }
            | EquationSpec::ResonancePair { p, .. } => *p,
            EquationSpec::LinearRepulsiveAttractive { .. } => 2,
            EquationSpec::UnionJackInner { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EquationSpec::LinearModel { .. } => "linear-model",
            EquationSpec::LinearRepulsiveAttractive { .. } => "linear-repulsive-attractive",
            EquationSpec::ControlledLinear { .. } => "controlled-linear",
            EquationSpec::QuasiLinear { .. } => "quasilinear",
            EquationSpec::UnionJackInner { .. } => "union-jack-inner",
            EquationSpec::ResonancePair { .. } => "resonance-pair",
        }
    }

    /// Checks the order constraints and the Taylor/evaluator consistency.
    pub fn validate(&self) -> Result<(), SolverError> {
        let p = self.p();
        match self {
            EquationSpec::LinearModel { g, .. } => {
                if p < 1 {
                    return Err(SolverError::Config("p must be at least 1".into()));
                }
                g.check_consistency()
            }
            EquationSpec::ControlledLinear { g, .. } => {
                if p < 2 || p % 2 != 0 {
                    return Err(SolverError::Config(format!(
                        "the canard setting needs an even p ≥ 2, got {p}"
                    )));
                }
                g.check_consistency()
            }
            EquationSpec::QuasiLinear { pfun, .. } => {
                if p < 1 {
                    return Err(SolverError::Config("p must be at least 1".into()));
                }
                pfun.check_consistency()
            }
            EquationSpec::LinearRepulsiveAttractive { g, .. } => g.check_consistency(),
            EquationSpec::UnionJackInner { c } => {
                if !c.is_finite() {
                    return Err(SolverError::Config(format!("c = {c} is not finite")));
                }
                Ok(())
            }
            EquationSpec::ResonancePair { alpha, .. } => {
                if p < 2 || p % 2 != 0 {
                    return Err(SolverError::Config(format!(
                        "the resonance setting needs an even p ≥ 2, got {p}"
                    )));
                }
                if alpha.is_zero() {
                    return Err(SolverError::Config("α must be nonzero".into()));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn polynomial_jets_extend_with_zeros() {
        let g = SlowFunction::polynomial(vec![q(1, 1), q(1, 1)]);
        assert_eq!(
            g.taylor::<Rational>(4).unwrap(),
            vec![q(1, 1), q(1, 1), q(0, 1), q(0, 1)]
        );
        assert_eq!(g.eval(2.0), 3.0);
        g.check_consistency().unwrap();
    }

    #[test]
    fn finite_jets_report_shortfall() {
        let g = SlowFunction::new("exp", vec![q(1, 1), q(1, 1)], Arc::new(f64::exp));
        assert!(matches!(
            g.taylor::<f64>(3),
            Err(SolverError::InsufficientTaylor {
                need: 3,
                got: 2,
                ..
            })
        ));
    }

    #[test]
    fn inconsistent_jet_is_caught() {
        let g = SlowFunction::new("bad", vec![q(1, 1), q(2, 1)], Arc::new(f64::exp));
        assert!(matches!(g.check_consistency(), Err(SolverError::Config(_))));
    }

    #[test]
    fn trivariate_box() {
        let p = TrivariateFunction::new(
            "y",
            vec![
                vec![vec![q(0, 1)], vec![q(1, 1)]],
                vec![vec![q(0, 1)], vec![q(0, 1)]],
            ],
            true,
            Arc::new(|_, y, _| y),
        )
        .unwrap();
        assert_eq!(p.orders(), (2, 2, 1));
        assert_eq!(p.coeff::<f64>(0, 1, 0), Some(1.0));
        assert_eq!(p.coeff::<f64>(5, 5, 5), Some(0.0));
        p.check_consistency().unwrap();
    }

    #[test]
    fn canard_setting_needs_even_order() {
        let g = SlowFunction::polynomial(vec![q(1, 1)]);
        assert!(EquationSpec::ControlledLinear { p: 3, g: g.clone() }
            .validate()
            .is_err());
        EquationSpec::ControlledLinear { p: 4, g }
            .validate()
            .unwrap();
    }
}
