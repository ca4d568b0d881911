//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077715401298963,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand not finite at t = {at}")]
    NonFinite { at: f64 },
    #[error("no convergence after {intervals} intervals: value {value}, error estimate {error}")]
    NotConverged {
        value: f64,
        error: f64,
        intervals: usize,
    },
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite { at: c });
    }
    let mut kron = fc * WGK[10];
    let mut gauss = 0.0;
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let t1 = c - h * x;
        let t2 = c + h * x;
        let (f1, f2) = (f(t1), f(t2));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite { at: t1 });
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite { at: t2 });
        }
        kron += w * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let value = kron * h;
    let error = ((kron - gauss) * h).abs();
    Ok((value, error))
}

/// Integrates `f` over `[a, b]` (either orientation).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if b < a {
        return integrate(f, b, a, opts).map(|r| QuadResult {
            value: -r.value,
            ..r
        });
    }
    let (v, e) = gk21(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut err = e;
    let mut count = 1;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= tol {
            return Ok(QuadResult {
                value: total,
                error: err,
                intervals: count,
            });
        }
        if count >= opts.max_intervals {
            return Err(QuadError::NotConverged {
                value: total,
                error: err,
                intervals: count,
            });
        }
        let worst = heap.pop().expect("heap holds every interval");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted in floating point; accept what we have.
            heap.push(worst);
            return Ok(QuadResult {
                value: total,
                error: err,
                intervals: count,
            });
        }
        let (v1, e1) = gk21(&f, worst.a, mid)?;
        let (v2, e2) = gk21(&f, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        count += 1;
    }
}

/// Integrates over a chain of breakpoints, summing the pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    let mut acc = QuadResult {
        value: 0.0,
        error: 0.0,
        intervals: 0,
    };
    for w in points.windows(2) {
        let r = integrate(&f, w[0], w[1], opts)?;
        acc.value += r.value;
        acc.error += r.error;
        acc.intervals += r.intervals;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|t| t.powi(5) - 2.0 * t, -1.0, 2.0, &QuadOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 64.0 / 6.0 - 1.0 / 6.0 - 3.0, epsilon = 1e-13);
    }

    #[test]
    fn gaussian_half_line() {
        let r = integrate(|t| (-t * t).exp(), -40.0, 0.0, &QuadOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let o = QuadOptions::default();
        let a = integrate(f64::cos, 0.0, 1.0, &o).unwrap().value;
        let b = integrate(f64::cos, 1.0, 0.0, &o).unwrap().value;
        assert_abs_diff_eq!(a, -b, epsilon = 1e-15);
        assert_abs_diff_eq!(a, 1f64.sin(), epsilon = 1e-14);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = integrate(
            |t: f64| t.sqrt().recip(),
            1e-300,
            1.0,
            &QuadOptions::with_abs_tol(1e-8),
        );
        let v = r.map(|r| r.value).unwrap_or_else(|e| match e {
            QuadError::NotConverged { value, .. } => value,
            other => panic!("{other}"),
        });
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn nonfinite_is_reported() {
        let r = integrate(|t| 1.0 / (t - 0.5), 0.0, 1.0, &QuadOptions::default());
        assert_eq!(r.unwrap_err(), QuadError::NonFinite { at: 0.5 });
    }
}
