//! Optimal truncation and truncated Borel–Laplace summation.

use dacx_num::quad::{integrate_pieces, QuadOptions};
use dacx_num::special::ln_gamma;

use crate::fit::GevreyEstimate;
use crate::GevreyError;

/// Truncation index and remainder estimate at a given `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalTruncation {
    /// Number of terms to keep.
    pub n_star: usize,
    /// `2 C (L1 η)^{N*} Γ(N*/p + 1)`, of size `exp(−A/η^p)` up to a power of `η`.
    pub remainder_bound: f64,
    /// `A = L1^{−p}`.
    pub exponent: f64,
}

/// `N* = round(p (η L1)^{−p})`, clamped to `available`.
pub fn optimal_truncate(est: &GevreyEstimate, eta: f64, available: usize) -> OptimalTruncation {
    let p = est.p;
    let ideal = p * (eta * est.l1).powf(-p);
    let n_star = (ideal.round().max(0.0) as usize).min(available);
    let n = n_star as f64;
    let ln_b = 2f64.ln() + est.c.ln() + n * (est.l1 * eta).ln() + ln_gamma(n / p + 1.0);
    OptimalTruncation {
        n_star,
        remainder_bound: ln_b.exp(),
        exponent: est.l1.powf(-p),
    }
}

/// Truncated Laplace integral settings (real direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BorelSumConfig {
    pub p: u32,
    /// Upper limit `ρ` of the Laplace integral, below the Borel radius.
    pub rho: f64,
    pub abs_tol: f64,
}

impl BorelSumConfig {
    pub fn new(p: u32, rho: f64) -> Self {
        Self {
            p,
            rho,
            abs_tol: 1e-13,
        }
    }
}

/// `ln |a_n / Γ(n/p + 1)|`, or `None` for zero coefficients.
fn ln_borel(a: f64, n: usize, p: f64) -> Option<f64> {
    (a != 0.0 && a.is_finite()).then(|| a.abs().ln() - ln_gamma(n as f64 / p + 1.0))
}

/// Root-test estimate of the radius of `Σ a_n t^n / Γ(n/p + 1)` from the upper
/// half of the coefficients; infinite for fewer than four nonzero entries.
pub fn borel_radius(coeffs: &[f64], p: u32) -> f64 {
    let p = p as f64;
    let upper: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(coeffs.len() / 2)
        .filter(|(n, _)| *n > 0)
        .filter_map(|(n, &a)| ln_borel(a, n, p).map(|l| l / n as f64))
        .collect();
    if upper.len() < 4 {
        return f64::INFINITY;
    }
    let growth = upper.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (-growth).exp()
}

/// `η^{−p} ∫_0^ρ e^{−t^p/η^p} ǎ(t) d(t^p)` with `ǎ(t) = Σ a_n t^n / Γ(n/p + 1)`.
pub fn borel_laplace(coeffs: &[f64], eta: f64, cfg: &BorelSumConfig) -> Result<f64, GevreyError> {
    if cfg.p == 0 || !(eta > 0.0) || !(cfg.rho > 0.0) {
        return Err(GevreyError::Config(format!(
            "need p ≥ 1, η > 0, ρ > 0 (p = {}, η = {eta}, ρ = {})",
            cfg.p, cfg.rho
        )));
    }
    let radius = borel_radius(coeffs, cfg.p);
    if cfg.rho >= radius {
        return Err(GevreyError::Config(format!(
            "ρ = {} is not below the Borel radius estimate {radius}",
            cfg.rho
        )));
    }
    let p = cfg.p as f64;
    let borel: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(n, &a)| ln_borel(a, n, p).map_or(0.0, |l| a.signum() * l.exp()))
        .collect();
    let b = |t: f64| borel.iter().rev().fold(0.0, |acc, c| acc * t + c);
    // In s = t/η the kernel is e^{−s^p}; beyond s^p = 50 it is below 2e−22.
    let s_max = (cfg.rho / eta).min(50f64.powf(1.0 / p));
    let f = |s: f64| {
        if s == 0.0 {
            return if cfg.p == 1 { b(0.0) } else { 0.0 };
        }
        (-s.powf(p)).exp() * b(eta * s) * p * s.powf(p - 1.0)
    };
    let pieces = 8;
    let points: Vec<f64> = (0..=pieces)
        .map(|i| s_max * i as f64 / pieces as f64)
        .collect();
    let opts = QuadOptions {
        abs_tol: cfg.abs_tol,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    integrate_pieces(f, &points, &opts)
        .map(|r| r.value)
        .map_err(|e| GevreyError::Quadrature(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_index_for_unit_type() {
        let est = GevreyEstimate {
            p: 2.0,
            c: 1.0,
            l1: 1.0,
            l2: 1.0,
            residual: 0.0,
        };
        assert_eq!(optimal_truncate(&est, 0.5, 100).n_star, 8);
        assert!(optimal_truncate(&est, 1.5, 100).n_star <= 2);
        assert_eq!(optimal_truncate(&est, 0.1, 20).n_star, 20);
    }

    #[test]
    fn geometric_series() {
        let v = borel_laplace(&vec![1.0; 60], 0.1, &BorelSumConfig::new(1, 5.0)).unwrap();
        assert!((v - 1.0 / 0.9).abs() < 1e-10, "{v}");
    }

    #[test]
    fn constant_series() {
        let v = borel_laplace(&[5.0, 0.0, 0.0], 0.1, &BorelSumConfig::new(2, 3.0)).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
    }

    #[test]
    fn radius_of_factorial_series_is_one() {
        let a: Vec<f64> = (0..120)
            .map(|n| (-1f64).powi(n) * ln_gamma(n as f64 + 1.0).exp())
            .collect();
        assert!((borel_radius(&a, 1) - 1.0).abs() < 1e-9);
        assert!(matches!(
            borel_laplace(&a, 0.1, &BorelSumConfig::new(1, 1.2)),
            Err(GevreyError::Config(_))
        ));
    }
}
