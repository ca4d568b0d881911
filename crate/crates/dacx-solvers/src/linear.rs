//! Explicit combined expansions of the linear examples.
//!
//! For `εy' = p x^{p−1} y + εg(x)` and the bounded solution
//! `y = e^{x^p/ε}∫_{ray}^x e^{−t^p/ε} g(t) dt`, write
//! `g = Σ_{j<p−1} g_j x^j + x^{p−1} r(x)`. The jet part gives
//! `Σ_j g_j η^{j+1} U_{j+1}(x/η)` and one integration by parts turns the rest into
//! `−(ε/p) r(x)` plus the same integral with `g` replaced by `r'/p` and an extra
//! factor `ε`. Iterating with `h_0 = g`, `h_{n+1} = (1/p)(S^{p−1} h_n)'`:
//!
//! - level `pn + j + 1` has fast part `[x^j]h_n · U_{j+1}`, `0 ≤ j ≤ p − 2`;
//! - level `p(n+1)` has slow part `−(1/p) S^{p−1} h_n`.
//!
//! For `p = 2` this is `a_{2n} = −½S((½DS)^{n−1}g)`, `g_{2n+1} = ((½DS)^n g)(0)·U`.

use dacx_core::{differentiate, mul, CombinedSeries, FastCoefficient, SlowSeries, Term};
use dacx_fastfn::{FastExpr, Ray};
use dacx_num::Scalar;

use crate::spec::{EquationSpec, SlowFunction};
use crate::SolverError;

fn check_ray(p: u32, ray: Ray) -> Result<(), SolverError> {
    if ray == Ray::Minus && p % 2 == 1 {
        return Err(SolverError::Config(format!(
            "e^(-t^{p}/ε) is unbounded at -∞ for odd p = {p}; use the + ray"
        )));
    }
    Ok(())
}

fn fast_term<S: Scalar>(
    expr: FastExpr<S>,
    order: usize,
) -> Result<FastCoefficient<S>, SolverError> {
    if expr.is_zero() {
        return Ok(FastCoefficient::zero(order));
    }
    Ok(FastCoefficient::from_expr(expr, order)?)
}

/// Combined expansion with `levels` levels of the solution bounded along `ray`.
///
/// Slow parts and fast tails have order `order`; `g` needs Taylor data to
/// order `order + p·levels`.
pub fn dac_linear_model<S: Scalar>(
    spec: &EquationSpec,
    ray: Ray,
    levels: usize,
    order: usize,
) -> Result<CombinedSeries<S>, SolverError> {
    let EquationSpec::LinearModel { p, g } = spec else {
        return Err(SolverError::Config(format!(
            "dac_linear_model needs a linear-model spec, got {}",
            spec.name()
        )));
    };
    linear_model_from_jet(*p, g, ray, levels, order)
}

pub(crate) fn linear_model_from_jet<S: Scalar>(
    p: u32,
    g: &SlowFunction,
    ray: Ray,
    levels: usize,
    order: usize,
) -> Result<CombinedSeries<S>, SolverError> {
    if p == 0 {
        return Err(SolverError::Config("p must be at least 1".into()));
    }
    check_ray(p, ray)?;
    let pu = p as usize;
    let mut h = SlowSeries::new(g.taylor::<S>(order + pu * levels)?);
    let mut terms: Vec<Term<S>> = (0..levels).map(|_| Term::zero(order)).collect();
    let inv_p = S::one() / S::from_i64(p as i64);
    let mut n = 0;
    while pu * n < levels {
        for j in 0..pu - 1 {
            let level = pu * n + j + 1;
            if level < levels {
                let c = h.get(j);
                terms[level].fast = fast_term(FastExpr::u(p, j as u32 + 1, ray).scale(c), order)?;
            }
        }
        let r = SlowSeries::new(h.coeffs.iter().skip(pu - 1).cloned().collect());
        let level = pu * (n + 1);
        if level < levels {
            terms[level].slow = r.scale(&-inv_p.clone()).truncate(order);
        }
        h = r.derivative().scale(&inv_p);
        n += 1;
    }
    Ok(CombinedSeries::new(p, terms)?)
}

/// Combined expansion of the solution of `εy' = −2xy + εg(x)`, `y(0) = c(ε)`,
/// with `c(ε) = Σ c_n η^n` given by `c_series`.
///
/// With `h_0 = g`, `h_{n+1} = −½(S h_n)'`, `b_n = h_n(0)`, `L(X) = e^{−X²}∫_0^X e^{T²}dT`:
/// `a_{2n+2} = ½ S h_n`, `g_0 = c_0 e^{−X²}`, `g_{2n+1} = b_n L + c_{2n+1} e^{−X²}`,
/// `g_{2n+2} = (c_{2n+2} − a_{2n+2}(0)) e^{−X²}`.
pub fn dac_initial_layer<S: Scalar>(
    g: &SlowFunction,
    c_series: &[S],
    levels: usize,
    order: usize,
) -> Result<CombinedSeries<S>, SolverError> {
    if c_series.len() < levels {
        return Err(SolverError::InsufficientTaylor {
            what: "initial value series c(ε)".into(),
            need: levels,
            got: c_series.len(),
        });
    }
    let mut h = SlowSeries::new(g.taylor::<S>(order + 2 * levels + 1)?);
    let gauss = || FastExpr::ExpPow { sign: -1, p: 2 };
    let mut terms: Vec<Term<S>> = (0..levels).map(|_| Term::zero(order)).collect();
    let half = S::ratio(1, 2);
    if levels > 0 {
        terms[0].fast = fast_term(gauss().scale(c_series[0].clone()), order)?;
    }
    let mut n = 0;
    while 2 * n + 1 < levels {
        let odd = 2 * n + 1;
        let e = FastExpr::sum(vec![
            FastExpr::Layer { p: 2 }.scale(h.get(0)),
            gauss().scale(c_series[odd].clone()),
        ]);
        terms[odd].fast = fast_term(e, order)?;
        let sh = h.shift()?;
        let even = 2 * n + 2;
        if even < levels {
            let a = sh.scale(&half);
            let d = c_series[even].clone() - a.get(0);
            terms[even].slow = a.truncate(order);
            terms[even].fast = fast_term(gauss().scale(d), order)?;
        }
        h = sh.derivative().scale(&-half.clone());
        n += 1;
    }
    Ok(CombinedSeries::new(2, terms)?)
}

/// `ε y' − p x^{p−1} y − ε g` expanded as a combined series, with `ε = η^p`.
///
/// Every coefficient vanishes when `y` is a formal solution; the number of
/// levels is limited by the derivative and by the orders of `y`.
pub fn linear_residual<S: Scalar>(
    y: &CombinedSeries<S>,
    g: &[S],
) -> Result<CombinedSeries<S>, SolverError> {
    let p = y.p as usize;
    let order = y
        .slow_orders()
        .into_iter()
        .chain(y.fast_orders())
        .min()
        .unwrap_or(0);
    let dy = differentiate(y)?.shift_eta(p);
    let mut coeff = vec![S::zero(); order.max(p)];
    coeff[p - 1] = S::from_i64(p as i64);
    let levels = y.eta_order();
    let padded = |first: Vec<S>| {
        let mut v = vec![first];
        v.resize(levels, vec![S::zero(); order]);
        CombinedSeries::from_slow(y.p, v, order)
    };
    let lin = mul(&padded(coeff), y)?;
    let mut jet = g.to_vec();
    jet.resize(order, S::zero());
    let forcing = padded(jet).shift_eta(p);
    let levels = dy.eta_order().min(lin.eta_order()).min(forcing.eta_order());
    Ok(dy
        .truncate_levels(levels)
        .sub(&lin.truncate_levels(levels))?
        .sub(&forcing.truncate_levels(levels))?)
}
