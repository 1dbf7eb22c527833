use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::expr::Bindings;
use crate::psi::{gamma, GridFunction, PsiGrid, QuadraturePlan};

use super::{ProblemSpec, SolverError};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Consecutive residual increases after which iteration is abandoned.
pub const DIVERGENCE_STEPS: usize = 5;

/// Outcome of [`solve`].
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub solution: GridFunction,
    pub iterations: usize,
    /// `residual_trace[m] = sup_i |u_{m+1}(t_i) − u_m(t_i)|` over checked nodes.
    pub residual_trace: Vec<f64>,
    /// Last ratio of successive non-zero residuals, if there are two.
    pub contraction_estimate: Option<f64>,
    pub converged: bool,
    /// Residuals are measured from this node on (1 when `γ < 1`).
    pub first_checked_node: usize,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_trace.last().copied().unwrap_or(0.0)
    }

    /// Successive ratios `residual_trace[m+1] / residual_trace[m]`.
    pub fn residual_ratios(&self) -> Vec<f64> {
        self.residual_trace
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Value of the initial-condition term `(ψ(t_i)−ψ(0))^{γ−1} σ / Γ(γ)`.
///
/// Fails with [`SolverError::SingularPrefactor`] at node 0 when `γ < 1`.
pub fn prefactor_at_node(
    spec: &ProblemSpec,
    grid: &PsiGrid,
    node: usize,
) -> Result<f64, SolverError> {
    let g = spec.order.gamma();
    if g >= 1.0 {
        return Ok(spec.sigma);
    }
    if node == 0 {
        return Err(SolverError::SingularPrefactor { gamma: g });
    }
    let psi = grid.psi_values();
    Ok((psi[node] - psi[0]).powf(g - 1.0) * spec.sigma / gamma(g))
}

/// Prefactor on every node; node 0 holds a finite display placeholder (the
/// prefactor at `t_1 / 2`) when the true value is infinite.
fn prefactor_values(spec: &ProblemSpec, grid: &PsiGrid) -> Result<Vec<f64>, SolverError> {
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        match prefactor_at_node(spec, grid, i) {
            Ok(v) => out.push(v),
            Err(SolverError::SingularPrefactor { gamma: g }) => {
                let half = grid.nodes()[1] / 2.0;
                let dpsi = spec.psi_at(half)? - grid.psi_values()[0];
                out.push(dpsi.powf(g - 1.0) * spec.sigma / gamma(g));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The fixed-point operator `Ω`, optionally with an extra additive forcing
/// term (used to manufacture perturbed solutions).
pub struct PicardOperator<'a> {
    spec: &'a ProblemSpec,
    plan: &'a QuadraturePlan,
    prefactor: Vec<f64>,
    forcing: Option<Vec<f64>>,
}

impl<'a> PicardOperator<'a> {
    pub fn new(spec: &'a ProblemSpec, plan: &'a QuadraturePlan) -> Result<Self, SolverError> {
        if (plan.order() - spec.order.alpha()).abs() > 0.0 {
            return Err(SolverError::InvalidProblem(format!(
                "quadrature plan has order {}, problem has alpha = {}",
                plan.order(),
                spec.order.alpha()
            )));
        }
        Ok(Self {
            spec,
            plan,
            prefactor: prefactor_values(spec, plan.grid())?,
            forcing: None,
        })
    }

    /// Adds `forcing` (already integrated) to every application.
    pub fn with_forcing(mut self, forcing: &GridFunction) -> Result<Self, SolverError> {
        forcing.check_grid(self.plan.grid())?;
        self.forcing = Some(forcing.values().to_vec());
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<PsiGrid> {
        self.plan.grid()
    }

    /// The constant term as a grid function; the iteration's seed.
    pub fn seed(&self) -> Result<GridFunction, SolverError> {
        Ok(GridFunction::new(
            Arc::clone(self.grid()),
            self.prefactor.clone(),
        )?)
    }

    pub fn apply(&self, v: &GridFunction) -> Result<GridFunction, SolverError> {
        let grid = self.grid();
        v.check_grid(grid)?;
        let t = grid.nodes();
        let u = v.values();
        let source = t
            .iter()
            .zip(u)
            .map(|(&t, &u)| self.spec.source.eval(&Bindings::new().t(t).u(u)))
            .collect::<Result<Vec<_>, _>>()?;
        let source_int = self.plan.apply_values(&source);
        let mut out: Vec<f64> = self
            .prefactor
            .iter()
            .zip(&source_int)
            .map(|(c, s)| c + s)
            .collect();
        if !self.spec.kernel.is_literal_zero() {
            let memory = self.volterra_memory(t, u)?;
            for (o, m) in out.iter_mut().zip(self.plan.apply_values(&memory)) {
                *o += m;
            }
        }
        if let Some(forcing) = &self.forcing {
            for (o, f) in out.iter_mut().zip(forcing) {
                *o += f;
            }
        }
        Ok(GridFunction::new(Arc::clone(grid), out)?)
    }

    // ∫₀^{t_i} k(t_i, s, v(s)) ds by the composite trapezoid rule in s
    fn volterra_memory(&self, t: &[f64], u: &[f64]) -> Result<Vec<f64>, SolverError> {
        let h = self.grid().step();
        let kernel = &self.spec.kernel;
        (0..t.len())
            .into_par_iter()
            .map(|i| {
                if i == 0 {
                    return Ok(0.0);
                }
                let k = |j: usize| kernel.eval(&Bindings::new().t(t[i]).s(t[j]).u(u[j]));
                let mut acc = 0.5 * (k(0)? + k(i)?);
                for j in 1..i {
                    acc += k(j)?;
                }
                Ok(h * acc)
            })
            .collect()
    }
}

/// One application of `Ω` to `v`.
pub fn picard_step(
    spec: &ProblemSpec,
    plan_alpha: &QuadraturePlan,
    v: &GridFunction,
) -> Result<GridFunction, SolverError> {
    PicardOperator::new(spec, plan_alpha)?.apply(v)
}

fn iterate(
    op: &PicardOperator<'_>,
    first_checked: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport, SolverError> {
    if tol.is_nan() || tol <= 0.0 || max_iter == 0 {
        return Err(SolverError::InvalidProblem(format!(
            "need tol > 0 and max_iter >= 1, got tol = {tol}, max_iter = {max_iter}"
        )));
    }
    let mut current = op.seed()?;
    let mut trace: Vec<f64> = Vec::new();
    let mut rising = 0;
    let mut converged = false;
    for _ in 0..max_iter {
        let next = op.apply(&current)?;
        let r = next.sup_distance_from(&current, first_checked)?;
        if trace.last().is_some_and(|&prev| r > prev) {
            rising += 1;
        } else {
            rising = 0;
        }
        trace.push(r);
        current = next;
        if rising >= DIVERGENCE_STEPS {
            return Err(SolverError::NonContractive {
                residual_trace: trace,
            });
        }
        if r < tol {
            converged = true;
            break;
        }
    }
    let contraction_estimate = trace
        .windows(2)
        .rev()
        .find(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| w[1] / w[0]);
    Ok(SolveReport {
        solution: current,
        iterations: trace.len(),
        residual_trace: trace,
        contraction_estimate,
        converged,
        first_checked_node: first_checked,
    })
}

/// Picard iteration `u_{m+1} = Ω u_m` from the prefactor seed until the
/// sup-norm step drops below `tol` or `max_iter` steps were taken.
pub fn solve(spec: &ProblemSpec, tol: f64, max_iter: usize) -> Result<SolveReport, SolverError> {
    let grid = spec.grid()?;
    let plan = QuadraturePlan::new(spec.order.alpha(), &grid)?;
    solve_forced(spec, &plan, None, tol, max_iter)
}

/// As [`solve`] with an explicit plan and an optional additive forcing
/// `u = Ω u + forcing`.
pub fn solve_forced(
    spec: &ProblemSpec,
    plan_alpha: &QuadraturePlan,
    forcing: Option<&GridFunction>,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport, SolverError> {
    let mut op = PicardOperator::new(spec, plan_alpha)?;
    if let Some(f) = forcing {
        op = op.with_forcing(f)?;
    }
    iterate(&op, spec.first_checked_node(), tol, max_iter)
}
