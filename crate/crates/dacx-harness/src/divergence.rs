//! Level norms and the Gevrey-divergence signature at fixed `η`.

use dacx_core::CombinedSeries;
use dacx_gevrey::{gevrey_fit, optimal_truncate, GevreyEstimate, OptimalTruncation};
use dacx_num::Scalar;
use dacx_solvers::EquationSpec;

use crate::reference::reference_on_grid;
use crate::sweep::SweepOptions;
use crate::HarnessError;

/// Weighted size of each level: `Σ_k |a_{n,k}| r^k + |g_{n,1}|`, the slow
/// Taylor ℓ¹ norm on the disc of radius `r` plus the leading fast-tail coefficient.
pub fn level_norms<S: Scalar>(dac: &CombinedSeries<S>, r: f64) -> Vec<f64> {
    dac.terms
        .iter()
        .map(|t| {
            let slow: f64 = t
                .slow
                .coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * r + c.to_f64().abs());
            let fast = t.fast.tail.coeffs.first().map_or(0.0, |c| c.to_f64().abs());
            slow + fast
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub eta: f64,
    /// `errors[N]`: sup error of the `N`-level partial sum, `N = 0..=levels`.
    pub errors: Vec<f64>,
    /// Index of the smallest error.
    pub best_n: usize,
    pub estimate: GevreyEstimate,
    pub predicted: OptimalTruncation,
    /// The error decreases first and stops improving before the last level.
    pub verdict: bool,
}

/// Sup errors of every partial sum of `dac` at one `η` over the points `xs`,
/// with the optimal truncation predicted from the level norms at radius `r`.
pub fn divergence_signature(
    spec: &EquationSpec,
    dac: &CombinedSeries<f64>,
    eta: f64,
    xs: &[f64],
    r: f64,
    opts: &SweepOptions,
) -> Result<DivergenceReport, HarnessError> {
    if !(eta > 0.0) || xs.is_empty() {
        return Err(HarnessError::Config(format!(
            "need η > 0 and sample points, got η = {eta}, {} points",
            xs.len()
        )));
    }
    let levels = dac.eta_order();
    let refs = reference_on_grid(spec, eta.powi(dac.p as i32), xs, &opts.reference)?;
    let mut errors = vec![0.0f64; levels + 1];
    for (x, reference) in xs.iter().zip(&refs) {
        let vals = dac.level_values(*x, eta, &opts.quad)?;
        let mut sum = 0.0;
        let mut scale = 1.0;
        errors[0] = errors[0].max(reference.abs());
        for (n, v) in vals.iter().enumerate() {
            sum += scale * v;
            scale *= eta;
            errors[n + 1] = errors[n + 1].max((sum - reference).abs());
        }
    }
    if errors.iter().any(|e| !e.is_finite()) {
        return Err(HarnessError::Numeric(format!(
            "non-finite partial-sum error at η = {eta}"
        )));
    }
    let best_n = (0..errors.len())
        .min_by(|&i, &j| errors[i].total_cmp(&errors[j]))
        .unwrap_or(0);
    let estimate = gevrey_fit(&level_norms(dac, r), None)?;
    let predicted = optimal_truncate(&estimate, eta, levels);
    let verdict = best_n > 0 && best_n < levels && errors[best_n] < errors[0];
    Ok(DivergenceReport {
        eta,
        errors,
        best_n,
        estimate,
        predicted,
        verdict,
    })
}
