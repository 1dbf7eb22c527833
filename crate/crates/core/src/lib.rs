//! Numerical solution of ψ-Hilfer fractional Volterra integro-differential
//! equations
//!
//! ```text
//! D^{α,β;ψ} u(t) = f(t, u(t)) + ∫₀ᵗ k(t, s, u(s)) ds,   I^{1−γ;ψ} u(0) = σ
//! ```
//!
//! by Picard iteration on the equivalent integral equation, together with
//! empirical certification of Hyers-Ulam (constant envelope `ε`) and
//! Hyers-Ulam-Rassias (function envelope `Φ(t)`) stability bounds.
//!
//! * [`expr`] parses the problem data `f`, `k`, `ψ`, `Φ`.
//! * [`psi`] discretizes the ψ-fractional integral and derivative.
//! * [`solver`] runs the fixed-point iteration and its diagnostics.
//! * [`stability`] computes the stability constants and certificates.

pub mod expr;
pub mod psi;
pub mod solver;
pub mod stability;
