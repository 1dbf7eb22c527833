//! Ulam-type stability constants, manufactured perturbed solutions and
//! empirical certification.
//!
//! A perturbed solution is produced by solving `u = Ω u + I^{α;ψ} δ` for an
//! admissible forcing `|δ| ≤ Φ` (or `≤ ε`): its integral-form residual is
//! exactly `I^{α;ψ} δ`. Certification compares `|u − u₀|` with the bound
//! `M Φ(t) / (1 − q)` (Rassias) or the constant Hyers-Ulam bound, node by node,
//! across a catalog of such forcings. This is evidence over the sampled
//! family, not a proof over every admissible `u`.

mod bounds;
mod certificate;
mod perturb;

use thiserror::Error;

use crate::psi::CalculusError;
use crate::solver::SolverError;

pub use bounds::{envelope_values, estimate_m, hu_bound, hur_bound};
pub use certificate::{
    verify, BoundSummary, PerturbationResult, StabilityCertificate, StabilityMode, VerifyConfig,
};
pub use perturb::{make_perturbed, make_perturbed_sampled, perturbation_catalog, Perturbation};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum StabilityError {
    #[error("problem has neither phi nor epsilon; nothing to certify")]
    NoEnvelope,
    #[error("operation requires {expected} mode")]
    WrongMode { expected: &'static str },
    #[error("phi must be positive, got {value} at t = {t} (node {node})")]
    NonpositivePhi { node: usize, t: f64, value: f64 },
    #[error("contraction condition fails: q = {q} is not below 1")]
    ContractionViolated { q: f64 },
    #[error("Hyers-Ulam bound denominator is not positive: {denominator}")]
    DegenerateDenominator { denominator: f64 },
    #[error("perturbation {value} exceeds envelope {envelope} at node {node}")]
    InadmissiblePerturbation {
        node: usize,
        value: f64,
        envelope: f64,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

impl StabilityError {
    /// The problem falls outside the stability hypotheses (as opposed to
    /// bad input or a numerical failure).
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(
            self,
            StabilityError::ContractionViolated { .. }
                | StabilityError::DegenerateDenominator { .. }
                | StabilityError::Solver(SolverError::NonContractive { .. })
        )
    }
}
