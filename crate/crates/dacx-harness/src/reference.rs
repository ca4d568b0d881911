//! Reference solutions.
//!
//! Linear kinds use their closed forms with the kernel written as
//! `e^{(x^p − t^p)/ε}` so that it never exceeds one on the stable side.
//! Quasilinear kinds, and the independent second oracle, integrate the ODE
//! from a base point where the bounded solution has forgotten its initial
//! value (`(x_0^p − x^p)/ε ≥ 40`).

use dacx_fastfn::QuadConfig;
use dacx_num::ode::{solve, Control, OdeOptions};
use dacx_num::quad::{integrate_pieces, QuadOptions};
use dacx_num::Scalar;
use dacx_solvers::{canard_alpha_numeric, EquationSpec};

use crate::HarnessError;

/// Kernel decay `−ln` beyond which an integrand is dropped (`e^{−46} ≈ 1e−20`).
const CUT: f64 = 46.0;
/// Burn-in `(x_0^p − x^p)/ε` of the ODE oracle.
const BURN_IN: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    /// Evaluate on the repulsive side, where the solution is exponentially large.
    pub allow_repulsive: bool,
    pub quad: QuadOptions,
    pub ode_rtol: f64,
    pub ode_atol: f64,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            allow_repulsive: false,
            quad: QuadOptions {
                abs_tol: 1e-15,
                rel_tol: 1e-13,
                max_intervals: 4000,
            },
            ode_rtol: 1e-12,
            ode_atol: 1e-15,
        }
    }
}

/// `∫_0^∞ e^{−φ(s)} f(x + dir·s) ds` with `φ(s) = ((x + dir·s)^p − x^p)/ε` increasing.
fn kernel_integral(
    p: u32,
    eps: f64,
    x: f64,
    dir: f64,
    f: &dyn Fn(f64) -> f64,
    opts: &QuadOptions,
) -> Result<f64, HarnessError> {
    let pi = p as i32;
    let phase = |s: f64| ((x + dir * s).powi(pi) - x.powi(pi)) / eps;
    let width = eps / (p as f64 * x.abs().powi(pi - 1) + eps.powf((p as f64 - 1.0) / p as f64));
    let mut s_max = width.min(1.0);
    for _ in 0..200 {
        let grow = f(x + dir * s_max).abs().max(1.0).ln();
        if phase(s_max) - grow >= CUT {
            break;
        }
        s_max *= 1.5;
    }
    if phase(s_max) < CUT {
        return Err(HarnessError::Domain(format!(
            "kernel does not decay from x = {x}"
        )));
    }
    let mut points: Vec<f64> = (0..=12).rev().map(|k| s_max / 2f64.powi(k)).collect();
    points.insert(0, 0.0);
    let r = integrate_pieces(|s| (-phase(s)).exp() * f(x + dir * s), &points, opts)
        .map_err(|e| HarnessError::Numeric(format!("quadrature at x = {x}: {e}")))?;
    Ok(r.value)
}

/// `∫_0^x e^{(t² − x²)/ε} f(t) dt`.
fn layer_integral(
    eps: f64,
    x: f64,
    f: &dyn Fn(f64) -> f64,
    opts: &QuadOptions,
) -> Result<f64, HarnessError> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let sigma = x.signum();
    let a = x.abs();
    // t = x − σs, phase (2a s − s²)/ε increasing on [0, a]
    let phase = |s: f64| (2.0 * a * s - s * s) / eps;
    let mut s_max = (eps / (2.0 * a)).min(a);
    while s_max < a && phase(s_max) < CUT + f(x - sigma * s_max).abs().max(1.0).ln() {
        s_max = (s_max * 1.5).min(a);
    }
    let mut points: Vec<f64> = (0..=12).rev().map(|k| s_max / 2f64.powi(k)).collect();
    points.insert(0, 0.0);
    let r = integrate_pieces(|s| (-phase(s)).exp() * f(x - sigma * s), &points, opts)
        .map_err(|e| HarnessError::Numeric(format!("quadrature at x = {x}: {e}")))?;
    Ok(sigma * r.value)
}

/// `Σ c_n η^n` for the initial value of the repulsive–attractive example.
fn initial_value(c: &[dacx_num::Rational], eps: f64) -> f64 {
    let eta = eps.sqrt();
    c.iter().rev().fold(0.0, |acc, cn| acc * eta + cn.to_f64())
}

fn repulsive(spec: &EquationSpec, x: f64, opts: &ReferenceOptions) -> Result<(), HarnessError> {
    if x > 0.0 && !opts.allow_repulsive {
        return Err(HarnessError::Domain(format!(
            "x = {x} lies on the repulsive side of {}, where the solution is exponentially large; \
             enable allow_repulsive to evaluate it",
            spec.name()
        )));
    }
    Ok(())
}

/// Bounded solution of `εy' = p x^{p−1} y + ε f(x)`: from `−∞` for even `p`, from `+∞` for odd `p`.
/// Even `p` at `x > 0` needs `allow_repulsive` and `x^p/ε` small enough to represent.
fn linear_closed_form(
    p: u32,
    eps: f64,
    x: f64,
    f: &dyn Fn(f64) -> f64,
    opts: &ReferenceOptions,
) -> Result<f64, HarnessError> {
    if p % 2 == 1 {
        return Ok(-kernel_integral(p, eps, x, 1.0, f, &opts.quad)?);
    }
    if x <= 0.0 {
        return kernel_integral(p, eps, x, -1.0, f, &opts.quad);
    }
    let grow = x.powi(p as i32) / eps;
    if grow > 700.0 {
        return Err(HarnessError::Domain(format!(
            "e^(x^p/ε) = e^{grow:.1} overflows at x = {x}"
        )));
    }
    let left = kernel_integral(p, eps, 0.0, -1.0, f, &opts.quad)?;
    let pts: Vec<f64> = (0..=16).map(|i| x * i as f64 / 16.0).collect();
    let mid = integrate_pieces(|t| (-t.powi(p as i32) / eps).exp() * f(t), &pts, &opts.quad)
        .map_err(|e| HarnessError::Numeric(e.to_string()))?;
    Ok(grow.exp() * (left + mid.value))
}

/// Reference value `y(x, ε)` of the solution described by `spec`.
pub fn reference_solution(
    spec: &EquationSpec,
    eps: f64,
    x: f64,
    opts: &ReferenceOptions,
) -> Result<f64, HarnessError> {
    Ok(reference_on_grid(spec, eps, &[x], opts)?[0])
}

/// Reference values at every point of `xs`.
pub fn reference_on_grid(
    spec: &EquationSpec,
    eps: f64,
    xs: &[f64],
    opts: &ReferenceOptions,
) -> Result<Vec<f64>, HarnessError> {
    if !(eps > 0.0) {
        return Err(HarnessError::Config(format!(
            "ε must be positive, got {eps}"
        )));
    }
    spec.validate()?;
    match spec {
        EquationSpec::LinearModel { p, g } => xs
            .iter()
            .map(|&x| {
                if p % 2 == 0 {
                    repulsive(spec, x, opts)?;
                }
                linear_closed_form(*p, eps, x, &|t| g.eval(t), opts)
            })
            .collect(),
        EquationSpec::ControlledLinear { p, g } => {
            let alpha = canard_alpha_numeric(spec, eps, &QuadConfig::default())?;
            let f = |t: f64| g.eval(t) + alpha;
            xs.iter()
                .map(|&x| {
                    if x <= 0.0 {
                        kernel_integral(*p, eps, x, -1.0, &f, &opts.quad)
                    } else {
                        Ok(-kernel_integral(*p, eps, x, 1.0, &f, &opts.quad)?)
                    }
                })
                .collect()
        }
        EquationSpec::LinearRepulsiveAttractive { g, c_series } => {
            let c = initial_value(c_series, eps);
            xs.iter()
                .map(|&x| {
                    Ok(layer_integral(eps, x, &|t| g.eval(t), &opts.quad)?
                        + c * (-x * x / eps).exp())
                })
                .collect()
        }
        EquationSpec::QuasiLinear { .. } => ode_reference(spec, eps, xs, opts),
        other => Err(HarnessError::Config(format!(
            "no reference solution for {}",
            other.name()
        ))),
    }
}

/// Right-hand side `F(x, y)` of `εy' = F(x, y)`.
type Field<'a> = Box<dyn Fn(f64, f64) -> f64 + 'a>;

fn field<'a>(spec: &'a EquationSpec, eps: f64) -> Result<(u32, Field<'a>), HarnessError> {
    Ok(match spec {
        EquationSpec::LinearModel { p, g } => {
            let pf = *p as f64;
            let pi = *p as i32;
            (
                *p,
                Box::new(move |x, y| pf * x.powi(pi - 1) * y + eps * g.eval(x)),
            )
        }
        EquationSpec::ControlledLinear { p, g } => {
            let alpha = canard_alpha_numeric(spec, eps, &QuadConfig::default())?;
            let pf = *p as f64;
            let pi = *p as i32;
            (
                *p,
                Box::new(move |x, y| pf * x.powi(pi - 1) * y + eps * (g.eval(x) + alpha)),
            )
        }
        EquationSpec::QuasiLinear { p, pfun } => {
            let pf = *p as f64;
            let pi = *p as i32;
            (
                *p,
                Box::new(move |x, y| pf * x.powi(pi - 1) * y + eps * pfun.eval(x, y, eps)),
            )
        }
        EquationSpec::LinearRepulsiveAttractive { g, .. } => {
            (2, Box::new(move |x, y| -2.0 * x * y + eps * g.eval(x)))
        }
        other => {
            return Err(HarnessError::Config(format!(
                "no ODE oracle for {}",
                other.name()
            )))
        }
    })
}

/// Integrates `εy' = F(x, y)` from `(x0, y0)` through `targets` in order.
fn march(
    f: &Field<'_>,
    eps: f64,
    x0: f64,
    y0: f64,
    targets: &[f64],
    opts: &ReferenceOptions,
) -> Result<Vec<f64>, HarnessError> {
    let ode = OdeOptions {
        rtol: opts.ode_rtol,
        atol: opts.ode_atol,
        ..OdeOptions::default()
    };
    let (mut x, mut y) = (x0, y0);
    let mut out = Vec::with_capacity(targets.len());
    for &t in targets {
        let r = solve(
            |s, v, dv| dv[0] = f(s, v[0]) / eps,
            x,
            &[y],
            t,
            &ode,
            |_, _| Control::Continue,
        )
        .map_err(|e| HarnessError::Numeric(format!("ODE oracle: {e}")))?;
        x = t;
        y = r.y[0];
        out.push(y);
    }
    Ok(out)
}

/// Second oracle: direct integration of the ODE onto `xs`.
pub fn ode_reference(
    spec: &EquationSpec,
    eps: f64,
    xs: &[f64],
    opts: &ReferenceOptions,
) -> Result<Vec<f64>, HarnessError> {
    if !(eps > 0.0) {
        return Err(HarnessError::Config(format!(
            "ε must be positive, got {eps}"
        )));
    }
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    spec.validate()?;
    let (p, f) = field(spec, eps)?;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut out = vec![0.0; xs.len()];
    let pf = p as f64;
    let start = |x: f64| (x.abs().powf(pf) + BURN_IN * eps).powf(1.0 / pf);
    // The first outer term −εF(x0, 0)/(p x0^{p−1}) as start value.
    let y_start = |x0: f64| -f(x0, 0.0) / (pf * x0.powf(pf - 1.0));

    if let EquationSpec::LinearRepulsiveAttractive { c_series, .. } = spec {
        let c = initial_value(c_series, eps);
        let (neg, pos): (Vec<usize>, Vec<usize>) =
            order.iter().copied().partition(|&i| xs[i] < 0.0);
        let back: Vec<f64> = neg.iter().rev().map(|&i| xs[i]).collect();
        for (i, v) in neg.iter().rev().zip(march(&f, eps, 0.0, c, &back, opts)?) {
            out[*i] = v;
        }
        let fwd: Vec<f64> = pos.iter().map(|&i| xs[i]).collect();
        for (i, v) in pos.iter().zip(march(&f, eps, 0.0, c, &fwd, opts)?) {
            out[*i] = v;
        }
        return Ok(out);
    }

    let controlled = matches!(spec, EquationSpec::ControlledLinear { .. });
    if p % 2 == 1 {
        // Stable backward from the right for odd p.
        let x0 = start(xs[order[order.len() - 1]].max(0.0));
        let targets: Vec<f64> = order.iter().rev().map(|&i| xs[i]).collect();
        for (i, v) in order
            .iter()
            .rev()
            .zip(march(&f, eps, x0, y_start(x0), &targets, opts)?)
        {
            out[*i] = v;
        }
        return Ok(out);
    }
    let (left, right): (Vec<usize>, Vec<usize>) = order
        .iter()
        .copied()
        .partition(|&i| xs[i] <= 0.0 || (opts.allow_repulsive && !controlled));
    if !right.is_empty() && !controlled {
        repulsive(spec, xs[right[0]], opts)?;
    }
    if !left.is_empty() {
        let x0 = -start(xs[left[0]].min(0.0));
        let targets: Vec<f64> = left.iter().map(|&i| xs[i]).collect();
        for (i, v) in left
            .iter()
            .zip(march(&f, eps, x0, y_start(x0), &targets, opts)?)
        {
            out[*i] = v;
        }
    }
    if !right.is_empty() {
        // The canard is bounded on both sides; integrate the right part backward.
        let x0 = start(xs[right[right.len() - 1]]);
        let targets: Vec<f64> = right.iter().rev().map(|&i| xs[i]).collect();
        for (i, v) in right
            .iter()
            .rev()
            .zip(march(&f, eps, x0, y_start(x0), &targets, opts)?)
        {
            out[*i] = v;
        }
    }
    Ok(out)
}
