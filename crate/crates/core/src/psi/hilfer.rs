use std::sync::Arc;

use super::{CalculusError, FractionalOrder, GridFunction, PsiGrid, QuadraturePlan};

/// `d/dt` of nodal values by second-order finite differences.
pub fn grid_derivative(grid: &PsiGrid, values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let h = grid.step();
    if n == 2 {
        let d = (values[1] - values[0]) / h;
        return vec![d, d];
    }
    (0..n)
        .map(|i| match i {
            0 => (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h),
            i if i == n - 1 => (3.0 * values[i] - 4.0 * values[i - 1] + values[i - 2]) / (2.0 * h),
            i => (values[i + 1] - values[i - 1]) / (2.0 * h),
        })
        .collect()
}

fn integrate(mu: f64, grid: &Arc<PsiGrid>, values: Vec<f64>) -> Result<Vec<f64>, CalculusError> {
    // I^0 is the identity
    if mu == 0.0 {
        return Ok(values);
    }
    Ok(QuadraturePlan::new(mu, grid)?.apply_values(&values))
}

/// ψ-Hilfer derivative `I^{β(1−α);ψ} (1/ψ' d/dt) I^{(1−β)(1−α);ψ} f`.
///
/// Evaluated compositionally: product-trapezoid integral, finite-difference
/// derivative, product-trapezoid integral. Accuracy depends on `f` being
/// smooth enough for differencing; near `t = 0` the inner integral is
/// typically only Hölder continuous and the first few nodes carry the
/// largest error.
pub fn hilfer_derivative(
    order: FractionalOrder,
    grid: &Arc<PsiGrid>,
    f: &GridFunction,
) -> Result<GridFunction, CalculusError> {
    f.check_grid(grid)?;
    let inner = integrate(order.inner_order(), grid, f.values().to_vec())?;
    let slope: Vec<f64> = grid_derivative(grid, &inner)
        .into_iter()
        .zip(grid.psi_prime_values())
        .map(|(d, p)| d / p)
        .collect();
    let out = integrate(order.outer_order(), grid, slope)?;
    GridFunction::new(Arc::clone(grid), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caputo_type_kills_constants() {
        let g = Arc::new(PsiGrid::identity(1.0, 129).unwrap());
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        let c = GridFunction::constant(&g, 3.25).unwrap();
        let d = hilfer_derivative(order, &g, &c).unwrap();
        assert!(d.values()[1..g.len() - 1].iter().all(|v| v.abs() < 1e-3));
    }

    #[test]
    fn derivative_exact_on_quadratics() {
        let g = PsiGrid::identity(2.0, 17).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|t| t * t - t).collect();
        for (t, d) in g.nodes().iter().zip(grid_derivative(&g, &vals)) {
            assert!((d - (2.0 * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let g = Arc::new(PsiGrid::identity(1.0, 9).unwrap());
        let other = Arc::new(PsiGrid::identity(1.0, 17).unwrap());
        let order = FractionalOrder::new(0.5, 0.5).unwrap();
        assert_eq!(
            hilfer_derivative(order, &g, &GridFunction::zeros(&other)).unwrap_err(),
            CalculusError::GridMismatch
        );
    }
}
