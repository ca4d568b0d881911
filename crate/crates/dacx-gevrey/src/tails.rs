//! Two-parameter Gevrey bounds for fast coefficients and their synthesis
//! from prescribed tail coefficients.
//!
//! Bound: `|X|^M |g_n(X) − Σ_{m<M} g_{nm} X^{−m}| ≤ C L1^n L2^M Γ((M+n)/p + 1)`.

use std::sync::Arc;

use dacx_fastfn::{FastExpr, LaplaceData, QuadConfig};
use dacx_num::special::ln_gamma;

use crate::fit::GevreyEstimate;
use crate::GevreyError;

/// Worst bound ratio over a grid check.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCheckReport {
    pub worst_ratio: f64,
    /// `(n, M, X)` attaining the worst ratio.
    pub witness: Option<(usize, usize, f64)>,
    pub checked: usize,
}

impl TailCheckReport {
    pub fn passed(&self) -> bool {
        self.worst_ratio <= 1.0
    }
}

fn ln_bound(t: &GevreyEstimate, n: usize, m: usize) -> f64 {
    t.c.ln() + n as f64 * t.l1.ln() + m as f64 * t.l2.ln() + ln_gamma((m + n) as f64 / t.p + 1.0)
}

/// Checks the bound for `g_n = tails[n]`, all `M ≤ m_max` and `X` in `grid`.
pub fn gevrey_tail_check(
    tails: &[FastExpr<f64>],
    t: &GevreyEstimate,
    grid: &[f64],
    m_max: usize,
    cfg: &QuadConfig,
) -> Result<TailCheckReport, GevreyError> {
    let mut report = TailCheckReport {
        worst_ratio: 0.0,
        witness: None,
        checked: 0,
    };
    for (n, g) in tails.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let a = g.asymptotic(m_max)?;
        let coeffs = &a.tail.coeffs;
        for &x in grid {
            let v = g.eval(x, cfg)?;
            // partial = Σ_{m=1}^{M−1} g_{nm} X^{−m}
            let mut partial = 0.0;
            for big_m in 0..=m_max.min(coeffs.len() + 1) {
                if big_m >= 2 {
                    partial += coeffs[big_m - 2] * x.powi(-(big_m as i32 - 1));
                }
                let lhs = x.abs().powi(big_m as i32) * (v - partial).abs();
                let ratio = if lhs == 0.0 {
                    0.0
                } else {
                    (lhs.ln() - ln_bound(t, n, big_m)).exp()
                };
                report.checked += 1;
                if ratio > report.worst_ratio {
                    report.worst_ratio = ratio;
                    report.witness = Some((n, big_m, x));
                }
            }
        }
    }
    Ok(report)
}

/// Functions `g_n(X) = X^n g̃_n(X)` with `g̃_n` the truncated Laplace transform of
/// `Σ_{m>n} g_{n,m−n} t^m / Γ(m/p + 1)`, whose tails are `g[n] = [g_{n,1}, g_{n,2}, …]`.
///
/// The coefficients must satisfy `|g_{nm}| ≤ C L1^n L2^m Γ((m+n)/p + 1)` for the
/// constants in `t`; the Laplace cut is `ρ = 1/(2 L2)`.
pub fn synth_tails(g: &[Vec<f64>], t: &GevreyEstimate) -> Result<Vec<FastExpr<f64>>, GevreyError> {
    let p = t.p.round();
    if (p - t.p).abs() > 1e-12 || p < 1.0 {
        return Err(GevreyError::Config(format!(
            "synthesis needs an integer p, got {}",
            t.p
        )));
    }
    let rho = 0.5 / t.l2;
    let mut out = Vec::with_capacity(g.len());
    for (n, row) in g.iter().enumerate() {
        for (i, &c) in row.iter().enumerate() {
            let m = i + 1;
            if c != 0.0 {
                let ratio = (c.abs().ln() - ln_bound(t, n, m)).exp();
                if ratio > 1.0 {
                    return Err(GevreyError::BoundViolation { n, m, ratio });
                }
            }
        }
        if row.iter().all(|c| *c == 0.0) {
            out.push(FastExpr::Zero);
            continue;
        }
        let mut coeffs = vec![0.0; n];
        coeffs.extend_from_slice(row);
        let lap = FastExpr::Laplace(Arc::new(LaplaceData {
            p: p as u32,
            rho,
            coeffs,
        }));
        out.push(if n == 0 {
            lap
        } else {
            FastExpr::product(vec![FastExpr::Monomial(n as i32), lap])
        });
    }
    Ok(out)
}

/// Constants satisfied by [`synth_tails`] output on the real axis:
/// `C̃ = 2C/(1 − L2 ρ)`, `L̃1 = L1/(L2 ρ)`, `L̃2 = 1/ρ` with `ρ = 1/(2 L2)`.
pub fn synth_constants(t: &GevreyEstimate) -> GevreyEstimate {
    let rho = 0.5 / t.l2;
    GevreyEstimate {
        p: t.p,
        c: 2.0 * t.c / (1.0 - t.l2 * rho),
        l1: t.l1 / (t.l2 * rho),
        l2: 1.0 / rho,
        residual: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(p: f64) -> GevreyEstimate {
        GevreyEstimate {
            p,
            c: 1.0,
            l1: 1.0,
            l2: 1.0,
            residual: 0.0,
        }
    }

    #[test]
    fn zero_rows_give_zero() {
        let s = synth_tails(&[vec![0.0; 4]], &unit(2.0)).unwrap();
        assert_eq!(s, vec![FastExpr::Zero]);
        let r = gevrey_tail_check(&s, &unit(2.0), &[1.0, 2.0], 4, &QuadConfig::default()).unwrap();
        assert!(r.passed() && r.witness.is_none());
    }

    #[test]
    fn violation_is_reported() {
        match synth_tails(&[vec![0.0, 10.0]], &unit(2.0)) {
            Err(GevreyError::BoundViolation { n: 0, m: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reciprocal_tail() {
        let s = synth_tails(&[vec![1.0]], &unit(1.0)).unwrap();
        let cfg = QuadConfig::default();
        assert!(s[0].eval(0.0, &cfg).unwrap().abs() < 1e-12);
        let x = 200.0;
        assert!((s[0].eval(x, &cfg).unwrap() - 1.0 / x).abs() < 1e-12);
    }
}
