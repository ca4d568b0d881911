//! Combined expansions for the model equation families:
//!
//! - linear turning points `εy' = p x^{p−1} y + εg(x)` and the initial-layer
//!   variant `εy' = −2xy + εg(x)`;
//! - the control parameter `α(ε)` of `εy' = 2xy + εg(x) + εα`;
//! - quasilinear turning points `εy' = p x^{p−1} y + εP(x, y, ε)`;
//! - the reduced inner equation `Y' = Y(Y − X)(Y + X) + c`, solved by shooting;
//! - the Riccati inner equation and the polynomial resonance test.

pub mod canard;
pub mod linear;
pub mod quasilinear;
pub mod resonance;
pub mod shoot;
pub mod spec;

use dacx_core::CoreError;
use dacx_fastfn::FastError;
use thiserror::Error;

pub use canard::{canard_alpha, canard_alpha_numeric, canard_moments, moment, CanardSeries};
pub use linear::{dac_initial_layer, dac_linear_model};
pub use quasilinear::{
    check_outer_poles, inner_sequence, outer_sequence, outer_sequence_unscaled, quasilinear_dac,
    InnerSolution,
};
pub use resonance::{
    resonance_check, riccati_fast_leading, ResonanceResult, ResonanceVerdict, RiccatiOptions,
};
pub use shoot::{canard_value_shoot, classify_trial, Escape, ShootOptions, ShootResult};
pub use spec::{EquationSpec, SlowFunction, TrivariateFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("insufficient Taylor data for {what}: need order {need}, got {got}")]
    InsufficientTaylor {
        what: String,
        need: usize,
        got: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sign change of the escape direction on [{lo}, {hi}]: {detail}")]
    Bracketing { lo: f64, hi: f64, detail: String },
    #[error("solution blows up near X = {x}")]
    Pole { x: f64 },
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("integration failed: {0}")]
    Ode(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Fast(#[from] FastError),
}
