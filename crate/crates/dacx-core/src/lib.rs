//! Truncated combined series `Σ (a_n(x) + g_n(x/η)) η^n`: algebra, calculus,
//! inner and outer expansions, matching, reciprocals and two-point merges.
//!
//! Coefficients are generic over [`dacx_num::Scalar`]: exact rationals for the
//! formal identities and `f64` for numerical work.

pub mod calculus;
pub mod inverse;
pub mod matching;
pub mod merge;
pub mod product;
pub mod series;
#[cfg(feature = "strategies")]
pub mod strategies;

use dacx_fastfn::FastError;
use thiserror::Error;

pub use calculus::{differentiate, integrate, LogAugmentedSeries};
pub use inverse::{invert_classify, InverseClass};
pub use matching::{
    extract_inner, extract_outer, match_reconstruct, matching_defect, InnerSeq, LaurentCoeff,
    LaurentSeq,
};
pub use merge::{two_point_merge, TwoPointSeries};
pub use product::{compose_left, mul};
pub use series::{
    distance, fast_shift, slow_shift, valuation, CombinedSeries, FastCoefficient, SlowSeries, Term,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("empty series: {0}")]
    Empty(&'static str),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("root orders differ: p = {left} vs p = {right}")]
    PMismatch { left: u32, right: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("outer and inner expansions disagree at (n, m) = ({n}, {m}) by {deviation:e}")]
    MatchingInconsistency { n: usize, m: i64, deviation: f64 },
    #[error("slow parts disagree at level {n}, x = {x}, by {deviation:e}")]
    OverlapMismatch { n: usize, x: f64, deviation: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("fast coefficient has a tail but no evaluable expression")]
    NotEvaluable,
    #[error(transparent)]
    Fast(#[from] FastError),
}
