use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::psi::{gamma, GridFunction, QuadraturePlan};
use crate::solver::{
    contraction_check, lipschitz_spot_check, solve, solve_forced, ContractionMode, Envelope,
    ProblemSpec, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

use super::{
    estimate_m, hu_bound, hur_bound, make_perturbed_sampled, perturbation_catalog, StabilityError,
};

const SPOT_CHECK_SAMPLES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StabilityMode {
    /// Hyers-Ulam-Rassias, envelope Φ(t).
    #[serde(rename = "HUR")]
    Rassias,
    /// Hyers-Ulam, constant envelope ε.
    #[serde(rename = "HU")]
    Ulam,
}

impl StabilityMode {
    /// Short label used in reports: `HUR` or `HU`.
    pub fn label(self) -> &'static str {
        match self {
            StabilityMode::Rassias => "HUR",
            StabilityMode::Ulam => "HU",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub num_perturbations: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            num_perturbations: 24,
            seed: 0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationResult {
    pub name: String,
    pub max_deviation: f64,
    /// `max_i (|u − u₀| − bound)` over checked nodes; certified runs need
    /// this at or below the slack.
    pub margin: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundSummary {
    pub min: f64,
    pub max: f64,
    pub at_horizon: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityCertificate {
    pub mode: StabilityMode,
    pub grid_size: usize,
    pub seed: u64,
    pub tol: f64,
    /// Grid estimate of the smallest valid `M` (Rassias mode only).
    pub m_estimated: Option<f64>,
    pub m_override: Option<f64>,
    /// `M` used for `q` and the bound.
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "q")]
    pub contraction_q: f64,
    pub epsilon: Option<f64>,
    pub bound_summary: BoundSummary,
    pub empirical_max_deviation: f64,
    pub max_margin: f64,
    pub quadrature_error_estimate: f64,
    pub slack: f64,
    pub first_checked_node: usize,
    pub base_iterations: usize,
    pub perturbations_tested: usize,
    pub perturbations: Vec<PerturbationResult>,
    pub certified: bool,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub solution: GridFunction,
    #[serde(skip)]
    pub bound: GridFunction,
    /// Per node, the largest `|u − u₀|` over all perturbations.
    #[serde(skip)]
    pub worst_deviation: Vec<f64>,
}

struct Constants {
    mode: StabilityMode,
    m_estimated: Option<f64>,
    m: f64,
    q: f64,
    epsilon: Option<f64>,
    bound: GridFunction,
}

fn constants(
    spec: &ProblemSpec,
    plan: &QuadraturePlan,
    warnings: &mut Vec<String>,
) -> Result<Constants, StabilityError> {
    let grid = plan.grid();
    match &spec.envelope {
        None => Err(StabilityError::NoEnvelope),
        Some(Envelope::Phi(_)) => {
            let estimated = estimate_m(spec, plan)?;
            let m = spec.m_override.map_or(estimated, |o| o.max(estimated));
            if let Some(o) = spec.m_override.filter(|o| *o < estimated) {
                warnings.push(format!(
                    "M override {o} is below the grid estimate {estimated}; using the estimate"
                ));
            }
            let report = contraction_check(spec, ContractionMode::Rassias { m });
            if !report.satisfied {
                return Err(StabilityError::ContractionViolated { q: report.q });
            }
            let bound = hur_bound(spec, grid, m, report.q)?;
            Ok(Constants {
                mode: StabilityMode::Rassias,
                m_estimated: Some(estimated),
                m,
                q: report.q,
                epsilon: None,
                bound,
            })
        }
        Some(Envelope::Epsilon(epsilon)) => {
            let value = hu_bound(spec)?;
            let span = spec.psi_span()?;
            let report = contraction_check(spec, ContractionMode::Ulam { psi_span: span });
            if !report.satisfied {
                let alpha = spec.order.alpha();
                return Err(StabilityError::DegenerateDenominator {
                    denominator: gamma(alpha + 1.0) * (1.0 - report.q),
                });
            }
            let horizon = spec.horizon;
            let stated = horizon * spec.lipschitz_f + 0.5 * horizon * horizon * spec.lipschitz_k;
            if stated >= 1.0 {
                warnings.push(format!(
                    "T*L_f + T^2/2*L_k = {stated} is not below 1 although the bound \
                     denominator is positive (q = {}); the certificate relies on q < 1",
                    report.q
                ));
            } else if (stated - report.q).abs() > 1e-12 * report.q.max(1.0) {
                warnings.push(format!(
                    "hypothesis constant T*L_f + T^2/2*L_k = {stated} differs from the \
                     contraction constant q = {} used by the bound",
                    report.q
                ));
            }
            Ok(Constants {
                mode: StabilityMode::Ulam,
                m_estimated: None,
                m: report.m,
                q: report.q,
                epsilon: Some(*epsilon),
                bound: GridFunction::constant(grid, value)?,
            })
        }
    }
}

/// Solves on `2n − 1` nodes and compares with `coarse` on the shared nodes.
fn refinement_error(
    spec: &ProblemSpec,
    coarse: &GridFunction,
    first: usize,
    config: &VerifyConfig,
) -> Result<f64, StabilityError> {
    let fine_spec = spec.clone().with_nodes(2 * spec.nodes - 1)?;
    let fine = solve(&fine_spec, config.tol, config.max_iter)?.solution;
    Ok(coarse
        .values()
        .iter()
        .enumerate()
        .skip(first)
        .map(|(i, v)| (v - fine.values()[2 * i]).abs())
        .fold(0.0, f64::max))
}

/// Solves for `u₀`, manufactures `config.num_perturbations` perturbed
/// solutions and checks each against the stability bound node by node.
///
/// Refuses (with an error, no certificate) when the contraction condition
/// fails. A run with zero perturbations is never certified.
pub fn verify(
    spec: &ProblemSpec,
    config: &VerifyConfig,
) -> Result<StabilityCertificate, StabilityError> {
    spec.validate()?;
    let grid = spec.grid()?;
    let plan = QuadraturePlan::new(spec.order.alpha(), &grid)?;
    let mut warnings = Vec::new();
    let c = constants(spec, &plan, &mut warnings)?;
    let first = spec.first_checked_node();

    let base = solve_forced(spec, &plan, None, config.tol, config.max_iter)?;
    if !base.converged {
        warnings.push(format!(
            "base solution did not converge in {} iterations (residual {})",
            config.max_iter,
            base.final_residual()
        ));
    }
    let quad_err = refinement_error(spec, &base.solution, first, config)?;
    let slack = 10.0 * config.tol + quad_err;

    let spot = lipschitz_spot_check(spec, SPOT_CHECK_SAMPLES, config.seed)?;
    if spot.any_violation() {
        warnings.push(format!(
            "sampled difference quotients exceed the asserted Lipschitz constants \
             (f: {} vs L_f = {}, k: {} vs L_k = {})",
            spot.max_ratio_f, spec.lipschitz_f, spot.max_ratio_k, spec.lipschitz_k
        ));
    }

    let catalog = perturbation_catalog(spec, &plan, config.num_perturbations, config.seed)?;
    let runs = catalog
        .par_iter()
        .map(|p| {
            make_perturbed_sampled(spec, &p.delta, &plan, config.tol, config.max_iter)
                .map(|report| (p.name.clone(), report))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let u0 = base.solution.values();
    let bound = c.bound.values();
    let mut worst = vec![0.0_f64; grid.len()];
    let mut results = Vec::with_capacity(runs.len());
    for (name, report) in runs {
        let mut max_deviation = 0.0_f64;
        let mut margin = f64::NEG_INFINITY;
        for i in first..grid.len() {
            let dev = (report.solution.values()[i] - u0[i]).abs();
            worst[i] = worst[i].max(dev);
            max_deviation = max_deviation.max(dev);
            margin = margin.max(dev - bound[i]);
        }
        if !report.converged {
            warnings.push(format!("perturbed solve '{name}' did not converge"));
        }
        results.push(PerturbationResult {
            name,
            max_deviation,
            margin,
            iterations: report.iterations,
            converged: report.converged,
        });
    }

    let empirical_max_deviation = results.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    let max_margin = results
        .iter()
        .map(|r| r.margin)
        .fold(f64::NEG_INFINITY, f64::max);
    let certified = !results.is_empty()
        && base.converged
        && results.iter().all(|r| r.converged && r.margin <= slack)
        && !spot.any_violation();
    if results.is_empty() {
        warnings.push("no perturbations were tested; a vacuous run is never certified".into());
    }

    let checked = &bound[first..];
    let bound_summary = BoundSummary {
        min: checked.iter().copied().fold(f64::INFINITY, f64::min),
        max: checked.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        at_horizon: bound[grid.len() - 1],
    };

    Ok(StabilityCertificate {
        mode: c.mode,
        grid_size: grid.len(),
        seed: config.seed,
        tol: config.tol,
        m_estimated: c.m_estimated,
        m_override: spec.m_override,
        m: c.m,
        contraction_q: c.q,
        epsilon: c.epsilon,
        bound_summary,
        empirical_max_deviation,
        max_margin: if results.is_empty() { 0.0 } else { max_margin },
        quadrature_error_estimate: quad_err,
        slack,
        first_checked_node: first,
        base_iterations: base.iterations,
        perturbations_tested: results.len(),
        perturbations: results,
        certified,
        warnings,
        solution: base.solution,
        bound: GridFunction::new(Arc::clone(&grid), bound.to_vec())?,
        worst_deviation: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::FractionalOrder;

    fn hu_spec(lf: f64) -> ProblemSpec {
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        ProblemSpec::new(order, 1.0, 129, "t", "-u/2", "0", 1.0)
            .unwrap()
            .with_lipschitz(lf, 0.0)
            .unwrap()
            .with_epsilon(0.01)
            .unwrap()
    }

    #[test]
    fn certifies_linear_hu_problem() {
        let cert = verify(
            &hu_spec(0.5),
            &VerifyConfig {
                num_perturbations: 8,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(cert.certified, "{cert:?}");
        assert_eq!(cert.mode, StabilityMode::Ulam);
        assert_eq!(cert.perturbations_tested, 8);
        assert!(cert.empirical_max_deviation > 0.0);
        assert!(cert.empirical_max_deviation <= cert.bound_summary.max);
        // T L_f = 0.5 differs from q = 0.5/Γ(1.5)
        assert_eq!(cert.warnings.len(), 1);
    }

    #[test]
    fn vacuous_run_is_not_certified() {
        let cert = verify(
            &hu_spec(0.5),
            &VerifyConfig {
                num_perturbations: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!cert.certified);
        assert_eq!(cert.perturbations_tested, 0);
    }

    #[test]
    fn refuses_outside_hypotheses() {
        let err = verify(&hu_spec(1.0), &VerifyConfig::default()).unwrap_err();
        assert!(err.is_hypothesis_failure(), "{err:?}");
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        let hur = ProblemSpec::new(order, 1.0, 65, "t", "-u", "0", 1.0)
            .unwrap()
            .with_lipschitz(2.0, 0.0)
            .unwrap()
            .with_phi("exp(t)")
            .unwrap();
        assert!(matches!(
            verify(&hur, &VerifyConfig::default()),
            Err(StabilityError::ContractionViolated { .. })
        ));
    }

    #[test]
    fn understated_lipschitz_constant_blocks_certification() {
        // true constant is 0.5
        let cert = verify(
            &hu_spec(0.25),
            &VerifyConfig {
                num_perturbations: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!cert.certified);
        assert!(cert.warnings.iter().any(|w| w.contains("Lipschitz")));
    }

    #[test]
    fn requires_an_envelope() {
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        let plain = ProblemSpec::new(order, 1.0, 17, "t", "0", "0", 0.0).unwrap();
        assert!(matches!(
            verify(&plain, &VerifyConfig::default()),
            Err(StabilityError::NoEnvelope)
        ));
    }
}
