//! Resonance of the inner Riccati equation.
//!
//! The fast leading term satisfies `Y' = αX^{p−1}Y − Y² − βX^{p−2}`. With
//! `Y = Z'/Z` this becomes `Z'' − αX^{p−1}Z' + βX^{p−2}Z = 0`. The formal solution
//! `Y ~ Σ y_k X^{−k}` has `y_1 = D = β/α`. Resonance means that `Z` is a
//! polynomial, which forces `D ∈ ℕ`. Writing `Z = Σ z_m X^m` gives
//! `z_{m+p} = α(m − D) z_m / ((m + p)(m + p − 1))`. Seeding `z_D = 1` and descending
//! reaches `m_0 = D mod p`, and the coefficient of `X^{m_0−2}` then reads
//! `m_0(m_0 − 1) z_{m_0} = 0`. So the pair is resonant iff `m_0 ∈ {0, 1}`.

use dacx_fastfn::Ray;
use dacx_num::ode::{solve, Control, OdeOptions};
use dacx_num::{Rational, Scalar};
use num_traits::Zero;

use crate::spec::EquationSpec;
use crate::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceVerdict {
    Resonant,
    NonResonant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceResult {
    pub d: Rational,
    pub verdict: ResonanceVerdict,
    /// Coefficients `z_0, …, z_D` of the polynomial solution, when resonant.
    pub z0: Option<Vec<Rational>>,
    /// Exponent `m_0` whose coefficient `m_0(m_0 − 1)z_{m_0}` obstructs a polynomial solution.
    pub witness: Option<usize>,
    pub reason: String,
}

fn pair(spec: &EquationSpec) -> Result<(Rational, Rational, u32), SolverError> {
    spec.validate()?;
    match spec {
        EquationSpec::ResonancePair { alpha, beta, p } => Ok((alpha.clone(), beta.clone(), *p)),
        _ => Err(SolverError::Config(format!(
            "resonance analysis needs a resonance pair, got {}",
            spec.name()
        ))),
    }
}

/// Decides whether `Z'' − αX^{p−1}Z' + βX^{p−2}Z = 0` has a polynomial solution.
pub fn resonance_check(spec: &EquationSpec) -> Result<ResonanceResult, SolverError> {
    let (alpha, beta, p) = pair(spec)?;
    let zero = Rational::zero();
    let d = beta / alpha.clone();
    let non = |reason: String| ResonanceResult {
        d: d.clone(),
        verdict: ResonanceVerdict::NonResonant,
        z0: None,
        witness: None,
        reason,
    };
    if !d.is_integer() {
        return Ok(non(format!("D = {d} is not an integer")));
    }
    if d < zero {
        return Ok(non(format!("D = {d} is negative")));
    }
    let df = Scalar::to_f64(&d);
    if df > 1e6 {
        return Err(SolverError::Config(format!(
            "D = {d} is too large for the descent"
        )));
    }
    let du = df as usize;
    let pu = p as usize;
    let mut z = vec![zero.clone(); du + 1];
    z[du] = <Rational as Scalar>::from_i64(1);
    let mut m = du;
    while m >= pu {
        let lo = m - pu;
        let num = <Rational as Scalar>::from_i64((m * (m - 1)) as i64);
        let den = alpha.clone() * (<Rational as Scalar>::from_i64(lo as i64) - d.clone());
        z[lo] = z[m].clone() * num / den;
        m = lo;
    }
    let m0 = du % pu;
    if m0 <= 1 {
        Ok(ResonanceResult {
            d: d.clone(),
            verdict: ResonanceVerdict::Resonant,
            z0: Some(z),
            witness: None,
            reason: format!("D = {d} ≡ {m0} mod {p}, the descent closes"),
        })
    } else {
        Ok(ResonanceResult {
            d: d.clone(),
            verdict: ResonanceVerdict::NonResonant,
            z0: None,
            witness: Some(m0),
            reason: format!(
                "D = {d} ≡ {m0} mod {p}, the coefficient {m0}·{}·z_{m0} of X^{} is nonzero",
                m0 - 1,
                m0 as i64 - 2
            ),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiOptions {
    /// `|X|` where integration starts from the truncated formal series.
    pub x_far: f64,
    /// Largest number of formal terms summed at `x_far`.
    pub terms: usize,
    pub rtol: f64,
    pub atol: f64,
    /// `|Y|` beyond which the solution is declared to have a pole.
    pub pole_bound: f64,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        Self {
            x_far: 20.0,
            terms: 30,
            rtol: 1e-12,
            atol: 1e-14,
            pole_bound: 1e8,
        }
    }
}

/// Coefficients `y_1, …, y_n` of the formal solution `Y ~ Σ y_k X^{−k}`.
fn formal_coeffs(alpha: f64, beta: f64, p: usize, n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n + 1];
    for k in 1..=n {
        let mut rhs = if k == 1 { beta } else { 0.0 };
        if k > p {
            rhs -= (k - p) as f64 * y[k - p];
        }
        if k + 1 > p {
            let s = k + 1 - p;
            rhs += (1..s).map(|i| y[i] * y[s - i]).sum::<f64>();
        }
        y[k] = rhs / alpha;
    }
    y
}

/// Sums the formal series at `x`, stopping at the smallest term.
fn formal_value(y: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    for (k, c) in y.iter().enumerate().skip(1) {
        let t = c * x.powi(-(k as i32));
        if t != 0.0 && t.abs() > last {
            break;
        }
        acc += t;
        if t != 0.0 {
            last = t.abs();
        }
    }
    acc
}

/// Values of the solution with `Y ~ D/X` along `ray` at the points of `grid`.
///
/// Requires `α > 0`, so that integration from the far end toward the origin is stable.
pub fn riccati_fast_leading(
    spec: &EquationSpec,
    ray: Ray,
    grid: &[f64],
    opts: &RiccatiOptions,
) -> Result<Vec<f64>, SolverError> {
    let (alpha, beta, p) = pair(spec)?;
    let (a, b) = (Scalar::to_f64(&alpha), Scalar::to_f64(&beta));
    if !(a > 0.0) {
        return Err(SolverError::Config(format!("α = {alpha} must be positive")));
    }
    let sign = if ray == Ray::Plus { 1.0 } else { -1.0 };
    if let Some(x) = grid
        .iter()
        .find(|&&x| !(x * sign >= 0.0 && x.abs() <= opts.x_far))
    {
        return Err(SolverError::Domain(format!(
            "grid point {x} is off the {ray:?} ray within X_far = {}",
            opts.x_far
        )));
    }
    let pi = p as i32;
    let field = move |x: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = a * x.powi(pi - 1) * y[0] - y[0] * y[0] - b * x.powi(pi - 2);
    };
    let coeffs = formal_coeffs(a, b, p as usize, opts.terms);
    let x_start = sign * opts.x_far;
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| grid[j].abs().total_cmp(&grid[i].abs()));
    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        ..OdeOptions::default()
    };
    let mut out = vec![0.0; grid.len()];
    let (mut x, mut y) = (x_start, formal_value(&coeffs, x_start));
    for i in order {
        let target = grid[i];
        let mut hit = None;
        let r = solve(field, x, &[y], target, &ode, |t, v| {
            if !(v[0].abs() <= opts.pole_bound) {
                hit = Some(t);
                return Control::Stop;
            }
            Control::Continue
        });
        match r {
            Ok(o) if hit.is_none() => {
                x = target;
                y = o.y[0];
            }
            Ok(_) => {
                return Err(SolverError::Pole {
                    x: hit.unwrap_or(target),
                })
            }
            Err(_) => {
                return Err(SolverError::Pole {
                    x: hit.unwrap_or(x),
                })
            }
        }
        out[i] = y;
    }
    Ok(out)
}
