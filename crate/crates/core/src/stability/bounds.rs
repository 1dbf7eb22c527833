use std::sync::Arc;

use crate::expr::Bindings;
use crate::psi::{gamma, GridFunction, PsiGrid, QuadraturePlan};
use crate::solver::{Envelope, ProblemSpec};

use super::StabilityError;

/// The envelope sampled on `grid`: `Φ(t_i)` in Rassias mode, `ε` in Ulam mode.
/// Φ must be strictly positive at every node.
pub fn envelope_values(
    spec: &ProblemSpec,
    grid: &Arc<PsiGrid>,
) -> Result<Vec<f64>, StabilityError> {
    match &spec.envelope {
        None => Err(StabilityError::NoEnvelope),
        Some(Envelope::Epsilon(e)) => Ok(vec![*e; grid.len()]),
        Some(Envelope::Phi(phi)) => {
            let mut out = Vec::with_capacity(grid.len());
            for (node, &t) in grid.nodes().iter().enumerate() {
                let value = phi
                    .eval(&Bindings::new().t(t))
                    .map_err(crate::solver::SolverError::from)?;
                if value.is_nan() || value <= 0.0 {
                    return Err(StabilityError::NonpositivePhi { node, t, value });
                }
                out.push(value);
            }
            Ok(out)
        }
    }
}

/// Smallest `M` valid on the grid: `max_{i≥1} (I^{α;ψ}Φ)(t_i) / Φ(t_i)`.
pub fn estimate_m(spec: &ProblemSpec, plan_alpha: &QuadraturePlan) -> Result<f64, StabilityError> {
    if !matches!(spec.envelope, Some(Envelope::Phi(_))) {
        return Err(StabilityError::WrongMode {
            expected: "Hyers-Ulam-Rassias (phi)",
        });
    }
    let phi = envelope_values(spec, plan_alpha.grid())?;
    let integrated = plan_alpha.apply_values(&phi);
    Ok(integrated
        .iter()
        .zip(&phi)
        .skip(1)
        .map(|(i, p)| i / p)
        .fold(0.0, f64::max))
}

/// `t_i ↦ M Φ(t_i) / (1 − q)`.
pub fn hur_bound(
    spec: &ProblemSpec,
    grid: &Arc<PsiGrid>,
    m: f64,
    q: f64,
) -> Result<GridFunction, StabilityError> {
    if !(q.is_finite() && (0.0..1.0).contains(&q)) {
        return Err(StabilityError::ContractionViolated { q });
    }
    if !matches!(spec.envelope, Some(Envelope::Phi(_))) {
        return Err(StabilityError::WrongMode {
            expected: "Hyers-Ulam-Rassias (phi)",
        });
    }
    let phi = envelope_values(spec, grid)?;
    let c = m / (1.0 - q);
    Ok(GridFunction::new(
        Arc::clone(grid),
        phi.iter().map(|p| c * p).collect(),
    )?)
}

/// Constant Hyers-Ulam bound
/// `(ψ(T)−ψ(0))^α ε / (Γ(α+1) − (ψ(T)−ψ(0))^α (L_f + T/2 · L_k))`.
pub fn hu_bound(spec: &ProblemSpec) -> Result<f64, StabilityError> {
    let Some(Envelope::Epsilon(epsilon)) = spec.envelope else {
        return Err(StabilityError::WrongMode {
            expected: "Hyers-Ulam (epsilon)",
        });
    };
    let alpha = spec.order.alpha();
    let scale = spec.psi_span()?.powf(alpha);
    let denominator =
        gamma(alpha + 1.0) - scale * (spec.lipschitz_f + 0.5 * spec.horizon * spec.lipschitz_k);
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(StabilityError::DegenerateDenominator { denominator });
    }
    Ok(scale * epsilon / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::FractionalOrder;

    fn base(n: usize) -> ProblemSpec {
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        ProblemSpec::new(order, 1.0, n, "t", "0", "0", 0.0).unwrap()
    }

    fn plan(spec: &ProblemSpec) -> QuadraturePlan {
        QuadraturePlan::new(spec.order.alpha(), &spec.grid().unwrap()).unwrap()
    }

    #[test]
    fn m_for_unit_phi_is_the_power_rule_constant() {
        let s = base(129).with_phi("1").unwrap();
        let m = estimate_m(&s, &plan(&s)).unwrap();
        let expected = 2.0 / std::f64::consts::PI.sqrt();
        assert!((m - expected).abs() < 1e-12, "{m}");
    }

    #[test]
    fn nonpositive_phi_rejected() {
        let s = base(9).with_phi("t").unwrap();
        assert!(matches!(
            estimate_m(&s, &plan(&s)),
            Err(StabilityError::NonpositivePhi { node: 0, .. })
        ));
        let s = base(9).with_phi("1 - t").unwrap();
        assert!(matches!(
            estimate_m(&s, &plan(&s)),
            Err(StabilityError::NonpositivePhi { node: 8, .. })
        ));
    }

    #[test]
    fn hur_bound_arithmetic() {
        let s = base(9).with_phi("1").unwrap();
        let g = s.grid().unwrap();
        let b = hur_bound(&s, &g, 0.8427, 0.11978).unwrap();
        for v in b.values() {
            assert!((v - 0.8427 / 0.88022).abs() < 1e-15);
            assert!((v - 0.957_374).abs() < 1e-6);
        }
        let exact = hur_bound(&s, &g, 0.8427, 0.0).unwrap();
        assert!(exact.values().iter().all(|v| *v == 0.8427));
        assert_eq!(
            hur_bound(&s, &g, 0.8427, 1.2).unwrap_err(),
            StabilityError::ContractionViolated { q: 1.2 }
        );
    }

    #[test]
    fn hu_bound_arithmetic() {
        let s = base(9)
            .with_lipschitz(0.2, 0.1)
            .unwrap()
            .with_epsilon(0.01)
            .unwrap();
        let gamma_3_2 = std::f64::consts::PI.sqrt() / 2.0;
        let b = hu_bound(&s).unwrap();
        assert!((b - 0.01 / (gamma_3_2 - 0.25)).abs() < 1e-15);
        assert!((b - 0.015_717_6).abs() < 1e-6);

        let zero = base(9)
            .with_lipschitz(0.2, 0.1)
            .unwrap()
            .with_epsilon(0.0)
            .unwrap();
        assert_eq!(hu_bound(&zero).unwrap(), 0.0);

        let bad = base(9)
            .with_lipschitz(1.0, 0.0)
            .unwrap()
            .with_epsilon(0.01)
            .unwrap();
        assert!(matches!(
            hu_bound(&bad),
            Err(StabilityError::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn hu_bound_is_linear_in_epsilon() {
        let s = |e| {
            base(9)
                .with_lipschitz(0.3, 0.2)
                .unwrap()
                .with_epsilon(e)
                .unwrap()
        };
        for e in [0.001, 0.01, 0.125, 3.0] {
            assert_eq!(
                hu_bound(&s(2.0 * e)).unwrap(),
                2.0 * hu_bound(&s(e)).unwrap()
            );
        }
    }

    #[test]
    fn modes_are_enforced() {
        let s = base(9).with_epsilon(0.1).unwrap();
        assert!(matches!(
            estimate_m(&s, &plan(&s)),
            Err(StabilityError::WrongMode { .. })
        ));
        let s = base(9).with_phi("1").unwrap();
        assert!(matches!(
            hu_bound(&s),
            Err(StabilityError::WrongMode { .. })
        ));
        assert!(matches!(
            hu_bound(&base(9)),
            Err(StabilityError::WrongMode { .. })
        ));
    }
}
