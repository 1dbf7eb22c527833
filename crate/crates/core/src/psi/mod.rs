//! ψ-weighted fractional calculus on uniform grids.
//!
//! The ψ-Riemann–Liouville integral
//!
//! ```text
//! I^{μ;ψ} f(t) = 1/Γ(μ) ∫₀ᵗ ψ'(ξ) (ψ(t) − ψ(ξ))^{μ−1} f(ξ) dξ
//! ```
//!
//! becomes the classical Riemann–Liouville integral in the variable
//! `τ = ψ(ξ)`. A [`QuadraturePlan`] discretizes it with product-trapezoidal
//! weights on the (non-uniform) abscissae `ψ(t_j)`; the ψ-Hilfer derivative is
//! then evaluated by composing two such integrals with a finite-difference
//! derivative.

mod grid;
mod hilfer;
mod order;
mod quadrature;

use thiserror::Error;

use crate::expr::EvalError;

pub use grid::{GridFunction, PsiGrid};
pub use hilfer::{grid_derivative, hilfer_derivative};
pub use order::FractionalOrder;
pub use quadrature::{frac_integral, QuadraturePlan};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CalculusError {
    #[error("invalid fractional order: {0}")]
    InvalidOrder(String),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("grid function lives on a different grid than the operator")]
    GridMismatch,
    #[error("grid function has {got} values, grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
