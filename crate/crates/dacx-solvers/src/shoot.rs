//! Canard value of the reduced inner equation `Y' = Y(Y − X)(Y + X) + c`.
//!
//! The solution `Y_g` decaying at `−∞` is started at `X = −X_far` from
//! `Y ≈ c/X² + 2c/X⁵`. Past the turning point it either leaves the repelling
//! branch `Y = X` upward and blows up, or falls back to the attracting branch
//! `Y ≈ 0`. The canard value separates the two behaviours and is located by
//! bisection.

use dacx_num::ode::{solve, Control, OdeOptions};

use crate::spec::EquationSpec;
use crate::SolverError;

/// Fate of a trial trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Escape {
    /// Crossed above `Y = X` and left the cone `|Y| ≤ 10(|X| + 1)` upward.
    Up,
    /// Fell below `Y = X/2` for `X > 1`, toward the attracting branch.
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    pub x_far: f64,
    /// Target width of the final bracket.
    pub tol: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Points kept from the final trajectory.
    pub samples: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            x_far: 10.0,
            tol: 1e-10,
            rtol: 1e-12,
            atol: 1e-14,
            samples: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult {
    pub c_value: f64,
    /// Bracket after every bisection step, starting with `(0, 1)`.
    pub brackets: Vec<(f64, f64)>,
    pub trials: Vec<(f64, Escape)>,
    /// `(X, Y)` along the trajectory at `c_value`.
    pub trajectory: Vec<(f64, f64)>,
}

fn field(x: f64, y: f64, c: f64) -> f64 {
    y * (y - x) * (y + x) + c
}

/// Integrates `Y_g(·, c)` from `−x_far` and classifies its fate.
pub fn classify_trial(
    c: f64,
    opts: &ShootOptions,
) -> Result<(Escape, Vec<(f64, f64)>), SolverError> {
    let x0 = -opts.x_far;
    let y0 = c / (x0 * x0) + 2.0 * c / x0.powi(5);
    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        ..OdeOptions::default()
    };
    let mut path = vec![(x0, y0)];
    let mut fate = None;
    let out = solve(
        |x, y, dy| dy[0] = field(x, y[0], c),
        x0,
        &[y0],
        opts.x_far,
        &ode,
        |x, y| {
            path.push((x, y[0]));
            if y[0].abs() > 10.0 * (x.abs() + 1.0) {
                fate = Some(if y[0] > 0.0 { Escape::Up } else { Escape::Down });
                return Control::Stop;
            }
            if x > 1.0 && y[0] < 0.5 * x {
                fate = Some(Escape::Down);
                return Control::Stop;
            }
            Control::Continue
        },
    );
    match out {
        Ok(o) => {
            let fate = fate.unwrap_or(if o.y[0] > o.t {
                Escape::Up
            } else {
                Escape::Down
            });
            Ok((fate, path))
        }
        // Blow-up can outrun the cone test between steps.
        Err(e) => match path.last() {
            Some(&(x, y)) if y > x => Ok((Escape::Up, path)),
            _ => Err(SolverError::Ode(format!("trial c = {c}: {e}"))),
        },
    }
}

fn subsample(path: &[(f64, f64)], n: usize) -> Vec<(f64, f64)> {
    if path.len() <= n || n < 2 {
        return path.to_vec();
    }
    (0..n)
        .map(|i| path[i * (path.len() - 1) / (n - 1)])
        .collect()
}

/// Bisection for `c_0 ∈ (0, 1)` with `Y_g(·, c_0)` following `Y ~ X` at `+∞`.
pub fn canard_value_shoot(
    spec: &EquationSpec,
    opts: &ShootOptions,
) -> Result<ShootResult, SolverError> {
    if !matches!(spec, EquationSpec::UnionJackInner { .. }) {
        return Err(SolverError::Config(format!(
            "canard shooting needs the union-jack inner equation, got {}",
            spec.name()
        )));
    }
    if !(opts.tol >= 1e-10) {
        return Err(SolverError::Config(format!(
            "tolerance {} is below 1e-10",
            opts.tol
        )));
    }
    if !(opts.x_far > 1.0) {
        return Err(SolverError::Config(format!(
            "X_far = {} must exceed 1",
            opts.x_far
        )));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut trials = Vec::new();
    let (f_lo, _) = classify_trial(lo, opts)?;
    let (f_hi, _) = classify_trial(hi, opts)?;
    trials.push((lo, f_lo));
    trials.push((hi, f_hi));
    if f_lo != Escape::Down || f_hi != Escape::Up {
        return Err(SolverError::Bracketing {
            lo,
            hi,
            detail: format!("c = 0 gives {f_lo:?} and c = 1 gives {f_hi:?}"),
        });
    }
    let mut brackets = vec![(lo, hi)];
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        let (f, _) = classify_trial(mid, opts)?;
        trials.push((mid, f));
        match f {
            Escape::Up => hi = mid,
            Escape::Down => lo = mid,
        }
        brackets.push((lo, hi));
    }
    let c_value = 0.5 * (lo + hi);
    let (_, path) = classify_trial(c_value, opts)?;
    Ok(ShootResult {
        c_value,
        brackets,
        trials,
        trajectory: subsample(&path, opts.samples),
    })
}
