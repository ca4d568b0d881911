//! Command-line front end for combined asymptotic expansions.
//!
//! - [`expr`]: expression parser, pretty-printer, evaluator and Taylor data.
//! - [`jet`]: truncated multivariate series arithmetic behind the Taylor data.
//! - [`problem`]: versioned JSON problem files.
//! - [`dump`]: lossless JSON form of an expansion, shared by `expand` and `eval`.
//! - [`commands`]: the subcommands.
//! - [`laws`]: seeded algebra-law runs.

pub mod commands;
pub mod dump;
pub mod error;
pub mod expr;
pub mod jet;
pub mod laws;
pub mod problem;

pub use error::{exit, CliError, EXIT_CODE_HELP};
pub use expr::{parse, Expr, SyntaxError, Var};
pub use problem::ProblemFile;
