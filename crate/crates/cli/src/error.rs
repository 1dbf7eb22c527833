use std::path::PathBuf;

use frac_core::psi::CalculusError;
use frac_core::solver::SolverError;
use frac_core::stability::StabilityError;
use thiserror::Error;

/// Process exit codes. The numeric values are a stable contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    InputError = 1,
    HypothesisFailure = 2,
    NotCertified = 3,
    NumericFailure = 4,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid problem file {path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Schema { .. }
            | CliError::Input(_) => ExitCode::InputError,
            CliError::Hypothesis(_) => ExitCode::HypothesisFailure,
            CliError::Numeric(_) => ExitCode::NumericFailure,
        }
    }

    /// Classifies an error raised after the problem was loaded and validated.
    pub fn from_solver(e: SolverError) -> Self {
        match e {
            SolverError::NonContractive { ref residual_trace } => CliError::Hypothesis(format!(
                "{e}; last residuals {:?}",
                &residual_trace[residual_trace.len().saturating_sub(6)..]
            )),
            SolverError::Parse(_) | SolverError::InvalidProblem(_) => {
                CliError::Input(e.to_string())
            }
            SolverError::Calculus(
                CalculusError::InvalidOrder(_) | CalculusError::DegenerateGrid(_),
            ) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }

    pub fn from_stability(e: StabilityError) -> Self {
        match e {
            StabilityError::Solver(inner) => Self::from_solver(inner),
            ref h if h.is_hypothesis_failure() => CliError::Hypothesis(e.to_string()),
            StabilityError::NoEnvelope
            | StabilityError::WrongMode { .. }
            | StabilityError::NonpositivePhi { .. } => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}
