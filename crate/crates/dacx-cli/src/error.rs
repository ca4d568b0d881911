//! Errors and exit codes.

use dacx_harness::HarnessError;
use dacx_solvers::SolverError;
use thiserror::Error;

use crate::expr::SyntaxError;

/// Exit codes, also listed in `--help`.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERDICT_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const SCHEMA: i32 = 3;
    pub const DOMAIN: i32 = 4;
    pub const NUMERIC: i32 = 5;
    pub const IO: i32 = 6;
}

pub const EXIT_CODE_HELP: &str = "\
Exit codes:
  0  success, every verdict passed
  1  a verdict failed
  2  usage error
  3  schema or configuration error in the problem file
  4  domain error (log at 0, repulsive side, divergent integral)
  5  numerical failure (quadrature, integration, bracketing)
  6  I/O error";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("syntax error in {what} at {err}")]
    Syntax { what: String, err: SyntaxError },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("I/O error on {path}: {detail}")]
    Io { path: String, detail: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Schema(_) | CliError::Syntax { .. } => exit::SCHEMA,
            CliError::Domain(_) => exit::DOMAIN,
            CliError::Numeric(_) => exit::NUMERIC,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub fn io(path: impl std::fmt::Display, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_string(),
            detail: e.to_string(),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        let text = e.to_string();
        match e {
            SolverError::Config(_) | SolverError::InsufficientTaylor { .. } => {
                CliError::Schema(text)
            }
            SolverError::Domain(_) => CliError::Domain(text),
            _ => CliError::Numeric(text),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(m) => CliError::Schema(m),
            HarnessError::Domain(m) => CliError::Domain(m),
            HarnessError::Io { path, detail } => CliError::Io { path, detail },
            HarnessError::Solver(s) => s.into(),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<dacx_gevrey::GevreyError> for CliError {
    fn from(e: dacx_gevrey::GevreyError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<dacx_core::CoreError> for CliError {
    fn from(e: dacx_core::CoreError) -> Self {
        CliError::Numeric(e.to_string())
    }
}
