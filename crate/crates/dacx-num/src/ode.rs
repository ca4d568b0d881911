//! Adaptive integration of `y' = f(t, y)`.
//!
//! Dormand–Prince 5(4) with step control. When the Hairer stiffness test fires
//! repeatedly the integrator hands over to the implicit trapezoidal rule with
//! Newton iterations and step-doubling error control.

use thiserror::Error;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `0` picks one from the tolerances.
    pub h0: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub stiff_fallback: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h0: 0.0,
            h_max: f64::INFINITY,
            max_steps: 500_000,
            stiff_fallback: true,
        }
    }
}

/// Verdict returned by the step observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeOutcome {
    pub t: f64,
    pub y: Vec<f64>,
    pub steps: usize,
    pub rejected: usize,
    /// `true` if the observer stopped integration before the end point.
    pub stopped: bool,
    /// Abscissa where the implicit fallback took over, if it did.
    pub stiff_from: Option<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget of {steps} exhausted at t = {t}")]
    TooManySteps { t: f64, steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("Newton iteration failed at t = {t}")]
    NewtonFailure { t: f64 },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn err_norm(err: &[f64], y0: &[f64], y1: &[f64], o: &OdeOptions) -> f64 {
    let n = err.len() as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = o.atol + o.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates from `t0` to `t1`, calling `observe(t, y)` after every accepted step.
pub fn solve<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<OdeOutcome, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]) -> Control,
{
    let n = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    f(t, &y, &mut k[0]);
    let mut h = if opts.h0 > 0.0 {
        opts.h0
    } else {
        let d0 = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let d1 = k[0].iter().map(|v| v.abs()).fold(0.0, f64::max);
        let guess = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        guess.min(span.max(1e-12))
    };
    h = h.min(opts.h_max);
    let mut steps = 0;
    let mut rejected = 0;
    let mut stiff_hits = 0;
    let mut fac_old: f64 = 1e-4;
    if span == 0.0 {
        return Ok(OdeOutcome {
            t,
            y,
            steps,
            rejected,
            stopped: false,
            stiff_from: None,
        });
    }
    while (t1 - t) * dir > 0.0 {
        if steps + rejected >= opts.max_steps {
            return Err(OdeError::TooManySteps {
                t,
                steps: steps + rejected,
            });
        }
        let mut last = false;
        if (t + dir * h - t1) * dir >= 0.0 {
            h = (t1 - t).abs();
            last = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(OdeError::StepUnderflow { t });
        }
        let hs = dir * h;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    acc += hs * A[s][j] * k[j][i];
                }
                tmp[i] = acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(t + C[s] * hs, &tmp, &mut tail[0]);
        }
        // Stage 7 evaluates at the 5th-order solution (FSAL).
        y_new.copy_from_slice(&tmp);
        for i in 0..n {
            let mut e = 0.0;
            for s in 0..7 {
                e += E[s] * k[s][i];
            }
            err[i] = hs * e;
        }
        let en = err_norm(&err, &y, &y_new, opts);
        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.2;
            rejected += 1;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(OdeError::NonFinite { t });
            }
            continue;
        }
        if en <= 1.0 {
            // Lund stabilization of the controller.
            let fac = (en.powf(0.17) * fac_old.powf(-0.04) / 0.9).clamp(0.1, 5.0);
            fac_old = en.max(1e-4);
            // Hairer stiffness test: h·|Δf|/|Δy| between the last two stages.
            let num: f64 = (0..n).map(|i| (k[6][i] - k[5][i]).powi(2)).sum();
            let mut den = 0.0;
            for i in 0..n {
                let mut y6 = y[i];
                for j in 0..6 {
                    y6 += hs * A[5][j] * k[j][i];
                }
                den += (y_new[i] - y6).powi(2);
            }
            if den > 0.0 && h * (num / den).sqrt() > 3.25 {
                stiff_hits += 1;
            } else {
                stiff_hits = 0;
            }
            t = if last { t1 } else { t + hs };
            std::mem::swap(&mut y, &mut y_new);
            let k6 = k[6].clone();
            k[0].copy_from_slice(&k6);
            steps += 1;
            if observe(t, &y) == Control::Stop {
                return Ok(OdeOutcome {
                    t,
                    y,
                    steps,
                    rejected,
                    stopped: true,
                    stiff_from: None,
                });
            }
            if opts.stiff_fallback && stiff_hits >= 15 {
                let stiff_from = t;
                let mut out = trapezoid(&mut f, t, &y, t1, opts, &mut observe)?;
                out.steps += steps;
                out.rejected += rejected;
                out.stiff_from = Some(stiff_from);
                return Ok(out);
            }
            h = (h / fac).min(opts.h_max);
        } else {
            let fac = (en.powf(0.2) / 0.9).clamp(1.0, 10.0);
            h /= fac;
            rejected += 1;
        }
    }
    Ok(OdeOutcome {
        t,
        y,
        steps,
        rejected,
        stopped: false,
        stiff_from: None,
    })
}

/// Solves the small dense system `m·x = b` in place by partial pivoting.
fn lu_solve(m: &mut [Vec<f64>], b: &mut [f64]) -> bool {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return false;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for c in col + 1..n {
            acc -= m[col][c] * b[c];
        }
        b[col] = acc / m[col][col];
    }
    true
}

fn trapezoid_step<F>(f: &mut F, t: f64, y: &[f64], fy: &[f64], h: f64) -> Option<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut z: Vec<f64> = (0..n).map(|i| y[i] + h * fy[i]).collect();
    let mut fz = vec![0.0; n];
    let mut fp = vec![0.0; n];
    for _ in 0..20 {
        f(t + h, &z, &mut fz);
        let res: Vec<f64> = (0..n)
            .map(|i| z[i] - y[i] - 0.5 * h * (fy[i] + fz[i]))
            .collect();
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let d = 1e-7 * z[j].abs().max(1.0);
            let mut zp = z.clone();
            zp[j] += d;
            f(t + h, &zp, &mut fp);
            for i in 0..n {
                jac[i][j] = -0.5 * h * (fp[i] - fz[i]) / d;
            }
            jac[j][j] += 1.0;
        }
        let mut delta: Vec<f64> = res.iter().map(|r| -r).collect();
        if !lu_solve(&mut jac, &mut delta) {
            return None;
        }
        let mut size: f64 = 0.0;
        for i in 0..n {
            z[i] += delta[i];
            size = size.max(delta[i].abs() / (1.0 + z[i].abs()));
        }
        if !size.is_finite() {
            return None;
        }
        if size < 1e-14 {
            return Some(z);
        }
    }
    None
}

fn trapezoid<F, O>(
    f: &mut F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
    observe: &mut O,
) -> Result<OdeOutcome, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]) -> Control,
{
    let n = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut fy = vec![0.0; n];
    let mut h = 1e-3 * (t1 - t0).abs().max(1e-12);
    let mut steps = 0;
    let mut rejected = 0;
    while (t1 - t) * dir > 0.0 {
        if steps + rejected >= opts.max_steps {
            return Err(OdeError::TooManySteps {
                t,
                steps: steps + rejected,
            });
        }
        let mut last = false;
        if (t + dir * h - t1) * dir >= 0.0 {
            h = (t1 - t).abs();
            last = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(OdeError::StepUnderflow { t });
        }
        f(t, &y, &mut fy);
        let hs = dir * h;
        let full = trapezoid_step(f, t, &y, &fy, hs);
        let half = trapezoid_step(f, t, &y, &fy, 0.5 * hs).and_then(|ym| {
            let mut fm = vec![0.0; n];
            f(t + 0.5 * hs, &ym, &mut fm);
            trapezoid_step(f, t + 0.5 * hs, &ym, &fm, 0.5 * hs)
        });
        let (full, half) = match (full, half) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                h *= 0.25;
                rejected += 1;
                continue;
            }
        };
        let err: Vec<f64> = (0..n).map(|i| (half[i] - full[i]) / 3.0).collect();
        let en = err_norm(&err, &y, &half, opts);
        if en <= 1.0 {
            t = if last { t1 } else { t + hs };
            // Richardson extrapolation of the two second-order results.
            y = (0..n).map(|i| half[i] + err[i]).collect();
            steps += 1;
            if observe(t, &y) == Control::Stop {
                return Ok(OdeOutcome {
                    t,
                    y,
                    steps,
                    rejected,
                    stopped: true,
                    stiff_from: None,
                });
            }
            h *= (0.9 * en.max(1e-10).powf(-1.0 / 3.0)).min(4.0);
        } else {
            h *= (0.9 * en.powf(-1.0 / 3.0)).max(0.1);
            rejected += 1;
        }
    }
    Ok(OdeOutcome {
        t,
        y,
        steps,
        rejected,
        stopped: false,
        stiff_from: None,
    })
}
