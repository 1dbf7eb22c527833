use std::sync::Arc;

use crate::expr::{Bindings, Expr};

use super::CalculusError;

/// Uniform grid `t_i = i·T/(n−1)` on `[0, T]` together with samples of ψ.
///
/// `ψ'` is approximated by second-order finite differences (central in the
/// interior, one-sided at the ends).
#[derive(Clone, Debug, PartialEq)]
pub struct PsiGrid {
    horizon: f64,
    nodes: Vec<f64>,
    psi: Vec<f64>,
    psi_prime: Vec<f64>,
}

impl PsiGrid {
    pub fn new<E>(
        horizon: f64,
        n: usize,
        psi: impl Fn(f64) -> Result<f64, E>,
    ) -> Result<Self, CalculusError>
    where
        CalculusError: From<E>,
    {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(CalculusError::DegenerateGrid(format!(
                "horizon T must be positive and finite, got {horizon}"
            )));
        }
        if n < 2 {
            return Err(CalculusError::DegenerateGrid(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        let last = (n - 1) as f64;
        let nodes: Vec<f64> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    horizon
                } else {
                    horizon * i as f64 / last
                }
            })
            .collect();
        let psi = nodes
            .iter()
            .map(|&t| psi(t).map_err(CalculusError::from))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_samples(horizon, nodes, psi)
    }

    pub fn from_expr(horizon: f64, n: usize, psi: &Expr) -> Result<Self, CalculusError> {
        Self::new(horizon, n, |t| psi.eval(&Bindings::new().t(t)))
    }

    /// Grid for the classical case `ψ(t) = t`.
    pub fn identity(horizon: f64, n: usize) -> Result<Self, CalculusError> {
        Self::new(horizon, n, Ok::<f64, CalculusError>)
    }

    fn from_samples(horizon: f64, nodes: Vec<f64>, psi: Vec<f64>) -> Result<Self, CalculusError> {
        if let Some((i, v)) = psi.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(CalculusError::DegenerateGrid(format!(
                "psi is not finite at node {i} (value {v})"
            )));
        }
        if let Some(i) = (1..psi.len()).find(|&i| psi[i] <= psi[i - 1]) {
            return Err(CalculusError::DegenerateGrid(format!(
                "psi is not strictly increasing between t = {} and t = {}",
                nodes[i - 1],
                nodes[i]
            )));
        }
        let n = nodes.len();
        let h = horizon / (n - 1) as f64;
        let psi_prime: Vec<f64> = if n == 2 {
            vec![(psi[1] - psi[0]) / h; 2]
        } else {
            (0..n)
                .map(|i| match i {
                    0 => (-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) / (2.0 * h),
                    i if i == n - 1 => (3.0 * psi[i] - 4.0 * psi[i - 1] + psi[i - 2]) / (2.0 * h),
                    i => (psi[i + 1] - psi[i - 1]) / (2.0 * h),
                })
                .collect()
        };
        if let Some(i) = psi_prime.iter().position(|d| d.is_nan() || *d <= 0.0) {
            return Err(CalculusError::DegenerateGrid(format!(
                "psi' is not positive at t = {} (estimate {})",
                nodes[i], psi_prime[i]
            )));
        }
        Ok(Self {
            horizon,
            nodes,
            psi,
            psi_prime,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Spacing in `t`.
    pub fn step(&self) -> f64 {
        self.horizon / (self.len() - 1) as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn psi_values(&self) -> &[f64] {
        &self.psi
    }

    pub fn psi_prime_values(&self) -> &[f64] {
        &self.psi_prime
    }

    /// `ψ(T) − ψ(0)`.
    pub fn psi_span(&self) -> f64 {
        self.psi[self.len() - 1] - self.psi[0]
    }
}

/// Real values sampled on the nodes of a [`PsiGrid`].
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<PsiGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<PsiGrid>, values: Vec<f64>) -> Result<Self, CalculusError> {
        if values.len() != grid.len() {
            return Err(CalculusError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(CalculusError::NonFinite { node, value });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<E>(
        grid: &Arc<PsiGrid>,
        f: impl Fn(f64) -> Result<f64, E>,
    ) -> Result<Self, CalculusError>
    where
        CalculusError: From<E>,
    {
        let values = grid
            .nodes()
            .iter()
            .map(|&t| f(t).map_err(CalculusError::from))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(Arc::clone(grid), values)
    }

    /// Samples an expression over `{t}`.
    pub fn from_expr(grid: &Arc<PsiGrid>, e: &Expr) -> Result<Self, CalculusError> {
        Self::from_fn(grid, |t| e.eval(&Bindings::new().t(t)))
    }

    pub fn constant(grid: &Arc<PsiGrid>, c: f64) -> Result<Self, CalculusError> {
        Self::new(Arc::clone(grid), vec![c; grid.len()])
    }

    pub fn zeros(grid: &Arc<PsiGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<PsiGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, grid: &Arc<PsiGrid>) -> bool {
        Arc::ptr_eq(&self.grid, grid) || *self.grid == **grid
    }

    pub fn check_grid(&self, grid: &Arc<PsiGrid>) -> Result<(), CalculusError> {
        if self.same_grid(grid) {
            Ok(())
        } else {
            Err(CalculusError::GridMismatch)
        }
    }

    /// `max_{i ≥ from} |self_i − other_i|`.
    pub fn sup_distance_from(
        &self,
        other: &GridFunction,
        from: usize,
    ) -> Result<f64, CalculusError> {
        other.check_grid(&self.grid)?;
        Ok(self.values[from..]
            .iter()
            .zip(&other.values[from..])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Nodewise `a·self + b·other`.
    pub fn lincomb(
        &self,
        a: f64,
        other: &GridFunction,
        b: f64,
    ) -> Result<GridFunction, CalculusError> {
        other.check_grid(&self.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        GridFunction::new(Arc::clone(&self.grid), values)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction, CalculusError> {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| f(t, v))
            .collect();
        GridFunction::new(Arc::clone(&self.grid), values)
    }
}
