use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::psi::{GridFunction, QuadraturePlan};
use crate::solver::{solve_forced, ProblemSpec, SolveReport};

use super::{envelope_values, StabilityError};

/// Number of equal subintervals of the random piecewise-constant forcings.
pub const RANDOM_PIECES: usize = 16;
const FIXED_SHAPES: usize = 4;

/// A named admissible forcing `δ` sampled on the grid.
#[derive(Clone, Debug)]
pub struct Perturbation {
    pub name: String,
    pub delta: GridFunction,
}

/// Solves `u = Ω u + I^{α;ψ} δ` for a forcing given as an expression over `t`.
pub fn make_perturbed(
    spec: &ProblemSpec,
    delta: &Expr,
    plan_alpha: &QuadraturePlan,
    tol: f64,
    max_iter: usize,
) -> Result<GridFunction, StabilityError> {
    let sampled = GridFunction::from_expr(plan_alpha.grid(), delta)?;
    Ok(make_perturbed_sampled(spec, &sampled, plan_alpha, tol, max_iter)?.solution)
}

/// As [`make_perturbed`] for a sampled forcing; returns the full solve
/// report. The forcing must satisfy `|δ(t_i)| ≤ envelope(t_i)` at every node.
pub fn make_perturbed_sampled(
    spec: &ProblemSpec,
    delta: &GridFunction,
    plan_alpha: &QuadraturePlan,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport, StabilityError> {
    let envelope = envelope_values(spec, plan_alpha.grid())?;
    delta.check_grid(plan_alpha.grid())?;
    for (node, (&value, &env)) in delta.values().iter().zip(&envelope).enumerate() {
        if value.abs() > env {
            return Err(StabilityError::InadmissiblePerturbation {
                node,
                value,
                envelope: env,
            });
        }
    }
    let forcing = plan_alpha.apply(delta)?;
    Ok(solve_forced(
        spec,
        plan_alpha,
        Some(&forcing),
        tol,
        max_iter,
    )?)
}

/// `count` admissible forcings: constant, negated, half-scaled and
/// sign-alternating multiples of the envelope first, then seeded random
/// piecewise-constant ones with values uniform in `[-1, 1]` times the
/// envelope.
pub fn perturbation_catalog(
    spec: &ProblemSpec,
    plan_alpha: &QuadraturePlan,
    count: usize,
    seed: u64,
) -> Result<Vec<Perturbation>, StabilityError> {
    let grid = plan_alpha.grid();
    let env = envelope_values(spec, grid)?;
    let nodes = grid.nodes();
    let horizon = grid.horizon();
    let shaped =
        |name: &str, shape: &dyn Fn(usize) -> f64| -> Result<Perturbation, StabilityError> {
            let values = env.iter().enumerate().map(|(i, e)| e * shape(i)).collect();
            Ok(Perturbation {
                name: name.to_string(),
                delta: GridFunction::new(Arc::clone(grid), values)?,
            })
        };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let p = match idx {
            0 => shaped("constant", &|_| 1.0)?,
            1 => shaped("negated", &|_| -1.0)?,
            2 => shaped("half", &|_| 0.5)?,
            3 => shaped("sign_alternating", &|i| (10.0 * nodes[i]).sin())?,
            _ => {
                let levels: Vec<f64> = (0..RANDOM_PIECES)
                    .map(|_| rng.random_range(-1.0..=1.0))
                    .collect();
                let piece = |i: usize| {
                    let k = (nodes[i] / horizon * RANDOM_PIECES as f64) as usize;
                    levels[k.min(RANDOM_PIECES - 1)]
                };
                shaped(&format!("random_piecewise_{}", idx - FIXED_SHAPES), &piece)?
            }
        };
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, VarSet};
    use crate::psi::FractionalOrder;
    use crate::solver::solve;

    fn hu_spec() -> ProblemSpec {
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        ProblemSpec::new(order, 1.0, 65, "t", "-u/2", "0", 1.0)
            .unwrap()
            .with_lipschitz(0.5, 0.0)
            .unwrap()
            .with_epsilon(0.01)
            .unwrap()
    }

    fn plan(spec: &ProblemSpec) -> QuadraturePlan {
        QuadraturePlan::new(spec.order.alpha(), &spec.grid().unwrap()).unwrap()
    }

    #[test]
    fn zero_forcing_reproduces_base_solution() {
        let s = hu_spec();
        let p = plan(&s);
        let zero = parse("0", VarSet::T).unwrap();
        let u = make_perturbed(&s, &zero, &p, 1e-12, 200).unwrap();
        let u0 = solve(&s, 1e-12, 200).unwrap().solution;
        assert!(u.sup_distance_from(&u0, 0).unwrap() <= 2e-12);
    }

    #[test]
    fn envelope_is_enforced_at_every_node() {
        let s = hu_spec();
        let p = plan(&s);
        let over = parse("0.01 + 1e-9*t", VarSet::T).unwrap();
        match make_perturbed(&s, &over, &p, 1e-10, 200) {
            Err(StabilityError::InadmissiblePerturbation { node, .. }) => assert_eq!(node, 1),
            other => panic!("expected rejection, got {other:?}"),
        }
        let exact = parse("0.01", VarSet::T).unwrap();
        assert!(make_perturbed(&s, &exact, &p, 1e-10, 200).is_ok());
    }

    #[test]
    fn rassias_sign_alternating_forcing_is_admissible() {
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        let s = ProblemSpec::new(order, 1.0, 65, "t", "-u/2", "0", 1.0)
            .unwrap()
            .with_lipschitz(0.5, 0.0)
            .unwrap()
            .with_phi("exp(t)")
            .unwrap();
        let p = plan(&s);
        let delta = parse("exp(t)*sin(10*t)", VarSet::T).unwrap();
        assert!(make_perturbed(&s, &delta, &p, 1e-10, 200).is_ok());
    }

    #[test]
    fn catalog_is_seeded_and_admissible() {
        let s = hu_spec();
        let p = plan(&s);
        let a = perturbation_catalog(&s, &p, 10, 5).unwrap();
        let b = perturbation_catalog(&s, &p, 10, 5).unwrap();
        let c = perturbation_catalog(&s, &p, 10, 6).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(a[3].name, "sign_alternating");
        assert_eq!(a[4].name, "random_piecewise_0");
        for ((x, y), z) in a.iter().zip(&b).zip(&c) {
            assert_eq!(x.delta.values(), y.delta.values());
            assert!(x.delta.values().iter().all(|v| v.abs() <= 0.01));
            if x.name.starts_with("random") {
                assert_ne!(x.delta.values(), z.delta.values());
            }
        }
        assert!(perturbation_catalog(&s, &p, 0, 5).unwrap().is_empty());
    }
}
