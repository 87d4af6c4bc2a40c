use thiserror::Error;

use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised inside the iterative solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(
        "barrier method did not converge after {iterations} Newton steps (gap estimate {gap:e})"
    )]
    BarrierNoConvergence { iterations: usize, gap: f64 },
    #[error("Newton system could not be solved at iteration {0}")]
    SingularNewtonSystem(usize),
    #[error("bisection upper bound {t_hi} is still feasible after {doublings} doublings")]
    BracketTooSmall { t_hi: f64, doublings: usize },
    #[error("bisection stopped after {iterations} iterations with relative width {width:e}")]
    BisectionStalled { iterations: usize, width: f64 },
    #[error("no strictly feasible point available for extraction at t = {0}")]
    ExtractionInfeasible(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("solver failure: {0}")]
    Solver(#[from] SolverError),
    #[error("{method} at {sweep_var}={value}: {failed} of {trials} trials failed (first: {first_reason})")]
    TooManyFailures {
        method: String,
        sweep_var: String,
        value: f64,
        failed: usize,
        trials: usize,
        first_reason: String,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Solver-side failures, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Solver(_)
                | Error::TooManyFailures { .. }
                | Error::Linalg(LinalgError::NoConvergence(_))
        )
    }
}
