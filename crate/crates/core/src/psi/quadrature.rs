use std::sync::Arc;

use rayon::prelude::*;

use super::{gamma, CalculusError, GridFunction, PsiGrid};

/// Above this panel-width to distance ratio the closed-form panel moments are
/// used; below it they cancel badly and a binomial series takes over.
const SERIES_RATIO: f64 = 0.25;
const SERIES_MAX_TERMS: usize = 400;

/// Product-trapezoidal weights for `I^{μ;ψ}` on a [`PsiGrid`].
///
/// Row `i` holds `w[i][0..=i]` with `(I^{μ;ψ} f)(t_i) ≈ Σ_j w[i][j] f(t_j)`.
/// In the variable `τ = ψ(ξ)` the integrand is interpolated linearly between
/// `τ_j = ψ(t_j)` and the kernel `(τ_i − τ)^{μ−1}/Γ(μ)` is integrated exactly
/// on every panel, so all weights are non-negative and the rule is exact on
/// functions that are affine in `ψ`.
#[derive(Clone, Debug)]
pub struct QuadraturePlan {
    mu: f64,
    grid: Arc<PsiGrid>,
    // packed lower triangle, row i starts at i(i+1)/2
    weights: Vec<f64>,
}

impl QuadraturePlan {
    pub fn new(mu: f64, grid: &Arc<PsiGrid>) -> Result<Self, CalculusError> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(CalculusError::InvalidOrder(format!(
                "integral order must be positive, got {mu}"
            )));
        }
        let psi = grid.psi_values();
        if (1..psi.len()).any(|i| psi[i] <= psi[i - 1]) {
            return Err(CalculusError::DegenerateGrid(
                "psi values are not strictly increasing".into(),
            ));
        }
        let scale = 1.0 / gamma(mu);
        let rows: Vec<Vec<f64>> = (0..grid.len())
            .into_par_iter()
            .map(|i| row_weights(mu, psi, i, scale))
            .collect();
        Ok(Self {
            mu,
            grid: Arc::clone(grid),
            weights: rows.concat(),
        })
    }

    pub fn order(&self) -> f64 {
        self.mu
    }

    pub fn grid(&self) -> &Arc<PsiGrid> {
        &self.grid
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.weights[start..start + i + 1]
    }

    /// Applies the rule to raw nodal values. Node 0 always maps to 0.
    pub fn apply_values(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.grid.len());
        (0..self.grid.len())
            .into_par_iter()
            .map(|i| self.row(i).iter().zip(f).map(|(w, v)| w * v).sum())
            .collect()
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction, CalculusError> {
        f.check_grid(&self.grid)?;
        GridFunction::new(Arc::clone(&self.grid), self.apply_values(f.values()))
    }
}

/// `I^{μ;ψ} f` on the grid of `plan`.
pub fn frac_integral(
    plan: &QuadraturePlan,
    f: &GridFunction,
) -> Result<GridFunction, CalculusError> {
    plan.apply(f)
}

fn row_weights(mu: f64, psi: &[f64], i: usize, scale: f64) -> Vec<f64> {
    let mut w = vec![0.0; i + 1];
    for j in 0..i {
        let far = psi[i] - psi[j];
        let near = psi[i] - psi[j + 1];
        let width = psi[j + 1] - psi[j];
        let (left, right) = panel_moments(mu, far, near, width);
        w[j] += left * scale;
        w[j + 1] += right * scale;
    }
    w
}

/// Moments of `x^{μ−1}` on `[near, far]` against the two linear hat
/// functions of the panel, divided by the panel width. `left` pairs with the
/// node at distance `far`, `right` with the node at distance `near`.
fn panel_moments(mu: f64, far: f64, near: f64, width: f64) -> (f64, f64) {
    if near > 0.0 && width / near <= SERIES_RATIO {
        return panel_moments_series(mu, near, width);
    }
    let d0 = (far.powf(mu) - near.powf(mu)) / mu;
    let d1 = (far.powf(mu + 1.0) - near.powf(mu + 1.0)) / (mu + 1.0);
    let left = (d1 - near * d0) / width;
    let right = (far * d0 - d1) / width;
    (left.max(0.0), right.max(0.0))
}

// x = near + width·θ, (1 + rθ)^{μ−1} expanded binomially in r = width/near
fn panel_moments_series(mu: f64, near: f64, width: f64) -> (f64, f64) {
    let r = width / near;
    let mut coeff = 1.0;
    let mut rk = 1.0;
    let mut left = 0.0;
    let mut right = 0.0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        let term = coeff * rk;
        let dl = term / (kf + 2.0);
        let dr = term / ((kf + 1.0) * (kf + 2.0));
        left += dl;
        right += dr;
        if dl.abs() <= f64::EPSILON * 1e-2 * left.abs() {
            break;
        }
        coeff *= (mu - 1.0 - kf) / (kf + 1.0);
        rk *= r;
    }
    let base = width * near.powf(mu - 1.0);
    (base * left, base * right)
}
