//! Gevrey diagnostics for coefficient sequences of order `1/p`:
//! growth fits `‖a_n‖ ≈ C L^n Γ(n/p + 1)`, two-parameter tail bounds,
//! optimal truncation, truncated Borel–Laplace sums and synthesis of fast
//! functions with prescribed tails.

pub mod fit;
pub mod summation;
pub mod tails;

use thiserror::Error;

pub use fit::{gevrey_fit, GevreyEstimate};
pub use summation::{
    borel_laplace, borel_radius, optimal_truncate, BorelSumConfig, OptimalTruncation,
};
pub use tails::{gevrey_tail_check, synth_constants, synth_tails, TailCheckReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GevreyError {
    #[error("need at least {need} nonzero norms, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("coefficient g_{{{n},{m}}} exceeds the Gevrey bound by a factor {ratio}")]
    BoundViolation { n: usize, m: usize, ratio: f64 },
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Fast(#[from] dacx_fastfn::FastError),
}
