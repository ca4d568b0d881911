//! Control parameter `α(ε)` of `εy' = p x^{p−1} y + εg(x) + εα` and the
//! moment conditions for bounded solutions across the turning point.
//!
//! Formal (`p = 2`): `α_0 = −g(0)`, `y_1 = −(g + α_0)/(2x)`, and for `n ≥ 1`
//! `α_n = y_n'(0)`, `y_{n+1} = (y_n' − α_n)/(2x)`; each step removes the pole.
//! Numeric: `α(ε) = −∫e^{−t^p/ε}g / ∫e^{−t^p/ε}`.

use dacx_core::SlowSeries;
use dacx_fastfn::{QuadConfig, Ray};
use dacx_num::quad::{integrate_pieces, QuadOptions};
use dacx_num::special::gamma;
use dacx_num::Scalar;

use crate::quasilinear::inner_sequence;
use crate::spec::{EquationSpec, SlowFunction, TrivariateFunction};
use crate::SolverError;

/// `Σ α_n ε^n` and the outer coefficients `y_n` of the bounded solution.
#[derive(Debug, Clone, PartialEq)]
pub struct CanardSeries<S> {
    pub alpha_coeffs: Vec<S>,
    /// `y_0..y_{N−1}` as Taylor germs; `y_0 = 0`.
    pub y_coeffs: Vec<SlowSeries<S>>,
}

fn controlled(spec: &EquationSpec) -> Result<(u32, &SlowFunction), SolverError> {
    match spec {
        EquationSpec::ControlledLinear { p, g } => {
            if *p < 2 || p % 2 != 0 {
                return Err(SolverError::Config(format!(
                    "the canard setting needs an even p ≥ 2, got {p}"
                )));
            }
            Ok((*p, g))
        }
        other => Err(SolverError::Config(format!(
            "expected a controlled-linear spec, got {}",
            other.name()
        ))),
    }
}

/// First `levels` coefficients of `α(ε)` for `p = 2`, with outer germs of order `order`.
pub fn canard_alpha<S: Scalar>(
    spec: &EquationSpec,
    levels: usize,
    order: usize,
) -> Result<CanardSeries<S>, SolverError> {
    let (p, g) = controlled(spec)?;
    if p != 2 {
        return Err(SolverError::Config(format!(
            "the formal control series is a power series in ε only for p = 2 (got p = {p})"
        )));
    }
    let jet = SlowSeries::new(g.taylor::<S>(order + 2 * levels)?);
    let half = S::ratio(1, 2);
    let mut alpha = Vec::with_capacity(levels);
    let mut ys = vec![SlowSeries::zeros(order)];
    if levels == 0 {
        return Ok(CanardSeries {
            alpha_coeffs: alpha,
            y_coeffs: Vec::new(),
        });
    }
    alpha.push(-jet.get(0));
    // y_1 = −(g − g(0))/(2x)
    let mut y = jet.shift()?.scale(&-half.clone());
    for _ in 1..levels {
        ys.push(y.truncate(order));
        let dy = y.derivative();
        alpha.push(dy.get(0));
        y = dy.shift()?.scale(&half);
    }
    Ok(CanardSeries {
        alpha_coeffs: alpha,
        y_coeffs: ys,
    })
}

/// Cut `L` with `L^p = 50`: beyond it `e^{−s^p}` is below `2e−22`.
fn cut(p: u32) -> f64 {
    50f64.powf(1.0 / p as f64)
}

fn quad_opts(cfg: &QuadConfig) -> QuadOptions {
    QuadOptions {
        abs_tol: cfg.abs_tol,
        rel_tol: 1e-13,
        max_intervals: 4000,
    }
}

/// `∫_ℝ e^{−s^p} f(s) ds` for even `p`, computed as `∫_0^∞ e^{−s^p}(f(s) + f(−s)) ds`
/// so that odd parts cancel pointwise.
pub fn moment(
    p: u32,
    f: impl Fn(f64) -> Result<f64, SolverError>,
    cfg: &QuadConfig,
) -> Result<f64, SolverError> {
    moment_split(p, &f, &f, cfg)
}

/// `∫_0^∞ e^{−s^p}(f_plus(s) + f_minus(−s)) ds`.
fn moment_split(
    p: u32,
    f_plus: &dyn Fn(f64) -> Result<f64, SolverError>,
    f_minus: &dyn Fn(f64) -> Result<f64, SolverError>,
    cfg: &QuadConfig,
) -> Result<f64, SolverError> {
    if p == 0 || p % 2 != 0 {
        return Err(SolverError::Config(format!(
            "moments over ℝ need an even p, got {p}"
        )));
    }
    let l = cut(p);
    let failure = std::cell::RefCell::new(None);
    let integrand = |s: f64| {
        let v = f_plus(s).and_then(|a| f_minus(-s).map(|b| a + b));
        match v {
            Ok(v) => (-s.powi(p as i32)).exp() * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let edge = integrand(l).abs();
    let divergent = || {
        SolverError::Domain(format!(
            "weighted integrand is still {edge:e} at |s| = {l:.3}; the moment does not converge"
        ))
    };
    if !edge.is_finite() {
        return Err(divergent());
    }
    let points: Vec<f64> = (0..=8).map(|i| l * i as f64 / 8.0).collect();
    let r = integrate_pieces(integrand, &points, &quad_opts(cfg))
        .map_err(|e| SolverError::Quadrature(e.to_string()))?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !r.value.is_finite() || edge > 1e-10 * r.value.abs().max(1.0) {
        return Err(divergent());
    }
    Ok(r.value)
}

/// `α(ε)` by quadrature in `s = t/ε^{1/p}`.
pub fn canard_alpha_numeric(
    spec: &EquationSpec,
    eps: f64,
    cfg: &QuadConfig,
) -> Result<f64, SolverError> {
    let (p, g) = controlled(spec)?;
    if !(eps > 0.0) {
        return Err(SolverError::Config(format!(
            "ε must be positive, got {eps}"
        )));
    }
    let eta = eps.powf(1.0 / p as f64);
    let num = moment(p, |s| Ok(g.eval(eta * s)), cfg)?;
    let den = 2.0 * gamma(1.0 / p as f64 + 1.0);
    Ok(-num / den)
}

/// Moments `I_k = ∫_ℝ e^{−s^p} G_{k+1}(s) ds`, `k < levels`, of the inner forcings.
///
/// `G_n` is formed from `Y_l^+` on `s > 0` and from `Y_l^-` on `s < 0`; the two
/// agree when the lower moments vanish, so `I_k` is meaningful as long as
/// `I_0..I_{k−1}` are zero. A controlled-linear spec is taken with `α ≡ 0`.
pub fn canard_moments(
    spec: &EquationSpec,
    levels: usize,
    cfg: &QuadConfig,
) -> Result<Vec<f64>, SolverError> {
    let (p, pfun) = match spec {
        EquationSpec::ControlledLinear { p, g } | EquationSpec::LinearModel { p, g } => {
            (*p, TrivariateFunction::from_slow(g))
        }
        EquationSpec::QuasiLinear { p, pfun } => (*p, pfun.clone()),
        other => {
            return Err(SolverError::Config(format!(
                "moments are defined for forced turning points, got {}",
                other.name()
            )))
        }
    };
    if p % 2 != 0 {
        return Err(SolverError::Config(format!(
            "moments over ℝ need an even p, got {p}"
        )));
    }
    let plus = inner_sequence::<f64>(p, &pfun, Ray::Plus, levels + 1)?;
    let minus = inner_sequence::<f64>(p, &pfun, Ray::Minus, levels + 1)?;
    (1..=levels)
        .map(|n| {
            let (gp, gm) = (&plus.forcing[n], &minus.forcing[n]);
            moment_split(p, &|s| Ok(gp.eval(s, cfg)?), &|s| Ok(gm.eval(s, cfg)?), cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use dacx_num::Rational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn controlled_poly(p: u32, c: Vec<Rational>) -> EquationSpec {
        EquationSpec::ControlledLinear {
            p,
            g: SlowFunction::polynomial(c),
        }
    }

    #[test]
    fn leading_coefficient_is_minus_g0() {
        let s: CanardSeries<Rational> =
            canard_alpha(&controlled_poly(2, vec![q(3, 1), q(1, 1)]), 3, 4).unwrap();
        assert_eq!(s.alpha_coeffs, vec![q(-3, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn even_monomials_match_gaussian_moments() {
        // g = x²: α = −ε/2; g = x⁴: α = −3ε²/4
        let s: CanardSeries<Rational> =
            canard_alpha(&controlled_poly(2, vec![q(0, 1), q(0, 1), q(1, 1)]), 3, 4).unwrap();
        assert_eq!(s.alpha_coeffs, vec![q(0, 1), q(-1, 2), q(0, 1)]);
        let g4 = vec![q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1)];
        let s: CanardSeries<Rational> = canard_alpha(&controlled_poly(2, g4), 4, 4).unwrap();
        assert_eq!(s.alpha_coeffs, vec![q(0, 1), q(0, 1), q(-3, 4), q(0, 1)]);
        assert!(s.y_coeffs.iter().all(|y| y.order() == 4));
    }

    #[test]
    fn odd_forcing_needs_no_control() {
        let s: CanardSeries<Rational> = canard_alpha(
            &controlled_poly(2, vec![q(0, 1), q(1, 1), q(0, 1), q(5, 1)]),
            4,
            4,
        )
        .unwrap();
        assert!(s.alpha_coeffs.iter().all(|a| a.is_zero()));
        let spec = EquationSpec::ControlledLinear {
            p: 2,
            g: SlowFunction::new("sin", vec![q(0, 1), q(1, 1)], Arc::new(f64::sin)),
        };
        assert_eq!(
            canard_alpha_numeric(&spec, 0.3, &QuadConfig::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn numeric_matches_formal_for_quadratic() {
        let spec = controlled_poly(2, vec![q(1, 1), q(0, 1), q(1, 1)]);
        let a = canard_alpha_numeric(&spec, 0.2, &QuadConfig::default()).unwrap();
        assert!((a - (-1.0 - 0.1)).abs() < 1e-13, "{a}");
    }

    #[test]
    fn quartic_quotient() {
        // g = x⁴, p = 4: α = −ε Γ(5/4)/(4 Γ(5/4))·… = −ε/4
        let spec = controlled_poly(4, vec![q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1)]);
        let a = canard_alpha_numeric(&spec, 0.5, &QuadConfig::default()).unwrap();
        assert!((a + 0.125).abs() < 1e-13, "{a}");
    }

    #[test]
    fn divergent_weight_is_a_domain_error() {
        let spec = EquationSpec::ControlledLinear {
            p: 2,
            g: SlowFunction::new(
                "exp(x^4)",
                vec![q(1, 1), q(0, 1)],
                Arc::new(|x: f64| (x.powi(4)).exp()),
            ),
        };
        assert!(matches!(
            canard_alpha_numeric(&spec, 1.0, &QuadConfig::default()),
            Err(SolverError::Domain(_))
        ));
    }

    #[test]
    fn constant_forcing_has_gaussian_first_moment() {
        let cfg = QuadConfig::default();
        let spec = EquationSpec::LinearModel {
            p: 2,
            g: SlowFunction::polynomial(vec![q(1, 1)]),
        };
        let m = canard_moments(&spec, 2, &cfg).unwrap();
        assert!((m[0] - std::f64::consts::PI.sqrt()).abs() < 1e-12, "{m:?}");
        let spec3 = EquationSpec::LinearModel {
            p: 2,
            g: SlowFunction::polynomial(vec![q(3, 1)]),
        };
        let m3 = canard_moments(&spec3, 1, &cfg).unwrap();
        assert!((m3[0] - 3.0 * m[0]).abs() < 1e-12);
    }

    #[test]
    fn odd_forcing_has_vanishing_moments() {
        let spec = EquationSpec::LinearModel {
            p: 2,
            g: SlowFunction::polynomial(vec![q(0, 1), q(2, 1), q(0, 1), q(-1, 1)]),
        };
        let m = canard_moments(&spec, 4, &QuadConfig::default()).unwrap();
        assert!(m.iter().all(|v| v.abs() < 1e-14), "{m:?}");
    }
}
