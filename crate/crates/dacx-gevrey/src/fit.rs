//! Fit of `log ‖a_n‖ ≈ log C + n log L + log Γ(n/p + 1)`.

use dacx_num::fit::least_squares;
use dacx_num::special::ln_gamma;

use crate::GevreyError;

/// Minimum number of nonzero norms accepted by [`gevrey_fit`].
pub const MIN_SAMPLES: usize = 6;

/// Integer orders scanned before refinement.
const P_GRID: [f64; 6] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];

/// Fitted Gevrey order `1/p` and type constants.
#[derive(Debug, Clone, PartialEq)]
pub struct GevreyEstimate {
    /// Fitted `p`; the Gevrey order is `1/p`.
    pub p: f64,
    pub c: f64,
    pub l1: f64,
    /// Tail type. Not identifiable from level norms alone; set to `l1` by the fit.
    pub l2: f64,
    /// `max_n |fitted_n / norm_n − 1|`.
    pub residual: f64,
}

impl GevreyEstimate {
    pub fn order(&self) -> f64 {
        1.0 / self.p
    }

    /// `C L1^n Γ(n/p + 1)`.
    pub fn bound(&self, n: usize) -> f64 {
        (self.c.ln() + n as f64 * self.l1.ln() + ln_gamma(n as f64 / self.p + 1.0)).exp()
    }
}

struct Trial {
    sse: f64,
    c: f64,
    l1: f64,
    residual: f64,
}

fn fit_at(samples: &[(f64, f64)], p: f64) -> Option<Trial> {
    let rows: Vec<Vec<f64>> = samples.iter().map(|&(n, _)| vec![1.0, n]).collect();
    let y: Vec<f64> = samples
        .iter()
        .map(|&(n, ln)| ln - ln_gamma(n / p + 1.0))
        .collect();
    let f = least_squares(&rows, &y, None)?;
    let sse = f.residuals.iter().map(|r| r * r).sum();
    let residual = f
        .residuals
        .iter()
        .map(|r| (-r).exp_m1().abs())
        .fold(0.0, f64::max);
    Some(Trial {
        sse,
        c: f.coeffs[0].exp(),
        l1: f.coeffs[1].exp(),
        residual,
    })
}

/// Golden-section minimum of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Estimates `(p, C, L1)` from `norms[n]`, the size of the `n`-th coefficient.
///
/// Zero and non-finite entries are skipped. With `p_hint` the order is held
/// fixed; otherwise the integer grid `1..=6` is scanned and the best point is
/// refined continuously within `±1/2`.
pub fn gevrey_fit(norms: &[f64], p_hint: Option<f64>) -> Result<GevreyEstimate, GevreyError> {
    let samples: Vec<(f64, f64)> = norms
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(n, v)| (n as f64, v.ln()))
        .collect();
    if samples.len() < MIN_SAMPLES {
        return Err(GevreyError::TooFewSamples {
            need: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let sse = |p: f64| fit_at(&samples, p).map_or(f64::INFINITY, |t| t.sse);
    let p = match p_hint {
        Some(p) if p > 0.0 => p,
        Some(p) => {
            return Err(GevreyError::Config(format!(
                "order hint p = {p} must be positive"
            )))
        }
        None => {
            let best = P_GRID
                .iter()
                .copied()
                .min_by(|a, b| sse(*a).total_cmp(&sse(*b)))
                .expect("grid is non-empty");
            let refined = golden_min(sse, (best - 0.5).max(0.25), best + 0.5, 1e-9);
            if sse(refined) <= sse(best) {
                refined
            } else {
                best
            }
        }
    };
    let t =
        fit_at(&samples, p).ok_or_else(|| GevreyError::Fit("singular normal equations".into()))?;
    Ok(GevreyEstimate {
        p,
        c: t.c,
        l1: t.l1,
        l2: t.l1,
        residual: t.residual,
    })
}
