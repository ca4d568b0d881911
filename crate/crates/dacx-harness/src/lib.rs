//! Validation harness for combined expansions.
//!
//! - [`grid`]: two-scale sample grids (outer `x`, inner `X = x/η`).
//! - [`reference`]: reference solutions by stable quadrature of the closed
//!   forms, and an independent ODE oracle.
//! - [`sweep`]: uniform errors of partial sums over an `η` list and order fits.
//! - [`report`]: CSV and JSON emission.
//! - [`divergence`]: level norms and the Gevrey-divergence signature.

pub mod divergence;
pub mod grid;
pub mod reference;
pub mod report;
pub mod sweep;

use thiserror::Error;

pub use divergence::{divergence_signature, level_norms, DivergenceReport};
pub use grid::GridSpec;
pub use reference::{ode_reference, reference_on_grid, reference_solution, ReferenceOptions};
pub use report::{emit_report, read_csv, ReportFormat};
pub use sweep::{error_sweep, OrderFit, ReportRow, SweepOptions, ValidationReport, Verdict};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("I/O error on {path}: {detail}")]
    Io { path: String, detail: String },
    #[error(transparent)]
    Solver(#[from] dacx_solvers::SolverError),
    #[error(transparent)]
    Core(#[from] dacx_core::CoreError),
    #[error(transparent)]
    Gevrey(#[from] dacx_gevrey::GevreyError),
}
