//! Fixed-point iteration for the integral form of the problem
//!
//! ```text
//! u(t) = (ψ(t)−ψ(0))^{γ−1} σ / Γ(γ) + I^{α;ψ}[f(·, u)](t) + I^{α;ψ}[ξ ↦ ∫₀^ξ k(ξ, s, u(s)) ds](t)
//! ```
//!
//! plus the contraction constant and a sampling check of the asserted
//! Lipschitz constants.

mod contraction;
mod lipschitz;
mod picard;
mod problem;

use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::psi::CalculusError;

pub use contraction::{contraction_check, ContractionMode, ContractionReport};
pub use lipschitz::{lipschitz_spot_check, lipschitz_spot_check_with_bound, SpotCheckReport};
pub use picard::{
    picard_step, prefactor_at_node, solve, solve_forced, PicardOperator, SolveReport,
    DEFAULT_MAX_ITER, DEFAULT_TOL, DIVERGENCE_STEPS,
};
pub use problem::{Envelope, ProblemSpec};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(
        "iteration is not contractive: residual grew for {DIVERGENCE_STEPS} consecutive steps"
    )]
    NonContractive { residual_trace: Vec<f64> },
    #[error("prefactor (psi(t)-psi(0))^(gamma-1) is singular at t = 0 for gamma = {gamma}")]
    SingularPrefactor { gamma: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}
