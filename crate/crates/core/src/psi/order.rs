use serde::Serialize;

use super::CalculusError;

/// The ψ-Hilfer order pair `(α, β)` with `0 < α < 1`, `0 ≤ β ≤ 1`.
///
/// The type parameter `γ = α + β(1 − α)` is derived on demand and never
/// stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FractionalOrder {
    alpha: f64,
    beta: f64,
}

impl FractionalOrder {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, CalculusError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CalculusError::InvalidOrder(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(CalculusError::InvalidOrder(format!(
                "beta must lie in [0, 1], got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.alpha + self.beta * (1.0 - self.alpha)
    }

    /// Order of the inner integral, `(1 − β)(1 − α)`.
    pub fn inner_order(&self) -> f64 {
        (1.0 - self.beta) * (1.0 - self.alpha)
    }

    /// Order of the outer integral, `β(1 − α)`.
    pub fn outer_order(&self) -> f64 {
        self.beta * (1.0 - self.alpha)
    }

    /// `γ < 1`: the solution carries an integrable singularity at `t = 0`.
    pub fn is_singular_at_origin(&self) -> bool {
        self.gamma() < 1.0
    }
}
