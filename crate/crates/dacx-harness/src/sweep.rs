//! Uniform errors of partial sums and convergence-order fits.

use std::time::Instant;

use dacx_core::CombinedSeries;
use dacx_fastfn::QuadConfig;
use dacx_num::fit::least_squares;
use dacx_solvers::EquationSpec;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::reference::{reference_on_grid, ReferenceOptions};
use crate::HarnessError;

/// Relative size of the quadrature noise floor used to weight the fit.
const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub reference: ReferenceOptions,
    pub quad: QuadConfig,
    /// Leave the largest `η` out of the order fit.
    pub drop_largest: bool,
    /// Accepted deviation `|slope − N|`.
    pub slope_tolerance: f64,
    /// Sup errors below this at every `η` count as an exact expansion.
    pub exact_threshold: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            reference: ReferenceOptions::default(),
            quad: QuadConfig::default(),
            drop_largest: false,
            slope_tolerance: 0.3,
            exact_threshold: 1e-9,
        }
    }
}

/// One `(η, N)` cell; the fit columns repeat the order fit of `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub eta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub sup_error: f64,
    pub fit_slope: Option<f64>,
    pub fit_stderr: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Log-log fit of the sup error against `η` for one truncation `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub n: usize,
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub exact: bool,
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub spec: String,
    pub rows: Vec<ReportRow>,
    pub fits: Vec<OrderFit>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.fits.iter().all(|f| f.verdict == Verdict::Pass)
    }

    /// Sup errors for truncation `n`, in `η` order.
    pub fn errors_for(&self, n: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| (r.eta, r.sup_error))
            .collect()
    }
}

fn fit_order(n: usize, samples: &[(f64, f64)], opts: &SweepOptions) -> OrderFit {
    if !samples.is_empty() && samples.iter().all(|(_, e)| *e < opts.exact_threshold) {
        return OrderFit {
            n,
            slope: None,
            stderr: None,
            exact: true,
            verdict: Verdict::Pass,
            reason: format!("sup error below {:e} at every η", opts.exact_threshold),
        };
    }
    let mut pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(_, e)| *e > 0.0 && e.is_finite())
        .collect();
    if opts.drop_largest && pts.len() >= 3 {
        let imax = (0..pts.len())
            .max_by(|&i, &j| pts[i].0.total_cmp(&pts[j].0))
            .unwrap_or(0);
        pts.remove(imax);
    }
    let rows: Vec<Vec<f64>> = pts.iter().map(|(eta, _)| vec![eta.ln(), 1.0]).collect();
    let y: Vec<f64> = pts.iter().map(|(_, e)| e.ln()).collect();
    let w: Vec<f64> = pts
        .iter()
        .map(|(_, e)| 1.0 / (1.0 + (NOISE_FLOOR / e).powi(2)))
        .collect();
    match least_squares(&rows, &y, Some(&w)).filter(|_| pts.len() >= 2) {
        Some(f) => {
            let slope = f.coeffs[0];
            let ok = (slope - n as f64).abs() <= opts.slope_tolerance;
            OrderFit {
                n,
                slope: Some(slope),
                stderr: Some(f.stderr[0]),
                exact: false,
                verdict: if ok { Verdict::Pass } else { Verdict::Fail },
                reason: format!(
                    "slope {slope:.3} ± {:.3}, expected {n} ± {}",
                    f.stderr[0], opts.slope_tolerance
                ),
            }
        }
        None => OrderFit {
            n,
            slope: None,
            stderr: None,
            exact: false,
            verdict: Verdict::Fail,
            reason: format!("{} usable points, cannot fit an order", pts.len()),
        },
    }
}

/// Sup errors of the `N`-level partial sums of `dac` against the reference
/// solution of `spec`, for every `η` of the grid and `N ∈ n_list`.
pub fn error_sweep(
    spec: &EquationSpec,
    dac: &CombinedSeries<f64>,
    grid: &GridSpec,
    n_list: &[usize],
    opts: &SweepOptions,
) -> Result<ValidationReport, HarnessError> {
    grid.validate()?;
    if let Some(n) = n_list.iter().find(|&&n| n > dac.eta_order()) {
        return Err(HarnessError::Config(format!(
            "N = {n} exceeds the {} levels of the expansion",
            dac.eta_order()
        )));
    }
    if dac.p != spec.p() {
        return Err(HarnessError::Config(format!(
            "expansion has p = {}, equation has p = {}",
            dac.p,
            spec.p()
        )));
    }
    let ref_opts = ReferenceOptions {
        allow_repulsive: grid.allow_repulsive,
        ..opts.reference
    };
    let per_eta: Vec<Result<Vec<ReportRow>, HarnessError>> = grid
        .etas
        .par_iter()
        .map(|&eta| {
            let start = Instant::now();
            let xs = grid.points(eta);
            let refs = reference_on_grid(spec, eta.powi(dac.p as i32), &xs, &ref_opts)?;
            let ref_ms = start.elapsed().as_secs_f64() * 1e3;
            n_list
                .iter()
                .map(|&n| {
                    let t = Instant::now();
                    let mut sup: f64 = 0.0;
                    for (x, r) in xs.iter().zip(&refs) {
                        let v = dac.partial_sum(*x, eta, n, &opts.quad)?;
                        sup = sup.max((v - r).abs());
                    }
                    let wall_ms = ref_ms + t.elapsed().as_secs_f64() * 1e3;
                    Ok(ReportRow {
                        eta,
                        n,
                        sup_error: sup,
                        fit_slope: None,
                        fit_stderr: None,
                        wall_ms,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_eta {
        rows.extend(r?);
    }
    let fits: Vec<OrderFit> = n_list
        .iter()
        .map(|&n| {
            let samples: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| (r.eta, r.sup_error))
                .collect();
            fit_order(n, &samples, opts)
        })
        .collect();
    for row in &mut rows {
        if let Some(f) = fits.iter().find(|f| f.n == row.n) {
            row.fit_slope = f.slope;
            row.fit_stderr = f.stderr;
        }
    }
    Ok(ValidationReport {
        spec: spec.name().to_string(),
        rows,
        fits,
    })
}
