use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::Bindings;

use super::{ProblemSpec, SolverError};

pub const DEFAULT_SAMPLE_BOUND: f64 = 10.0;
const VIOLATION_SLACK: f64 = 1e-9;

/// Largest difference quotients seen while sampling `f` and `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpotCheckReport {
    pub samples: usize,
    pub bound: f64,
    pub max_ratio_f: f64,
    pub max_ratio_k: f64,
    pub violation_f: bool,
    pub violation_k: bool,
}

impl SpotCheckReport {
    pub fn any_violation(&self) -> bool {
        self.violation_f || self.violation_k
    }
}

/// [`lipschitz_spot_check_with_bound`] with `u` drawn from `[-10, 10]`.
pub fn lipschitz_spot_check(
    spec: &ProblemSpec,
    samples: usize,
    seed: u64,
) -> Result<SpotCheckReport, SolverError> {
    lipschitz_spot_check_with_bound(spec, samples, seed, DEFAULT_SAMPLE_BOUND)
}

/// Samples `(t, s, u₁, u₂)` uniformly in `[0,T]² × [−B,B]²` and records the
/// largest `|f(t,u₁) − f(t,u₂)| / |u₁ − u₂|` (likewise for `k`). This can
/// falsify an asserted Lipschitz constant, never prove it.
pub fn lipschitz_spot_check_with_bound(
    spec: &ProblemSpec,
    samples: usize,
    seed: u64,
    bound: f64,
) -> Result<SpotCheckReport, SolverError> {
    if samples == 0 {
        return Err(SolverError::InvalidProblem(
            "spot check needs at least one sample".into(),
        ));
    }
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(SolverError::InvalidProblem(format!(
            "sample bound must be positive, got {bound}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = spec.horizon;
    let mut max_f: f64 = 0.0;
    let mut max_k: f64 = 0.0;
    for _ in 0..samples {
        let t = rng.random_range(0.0..=horizon);
        let s = rng.random_range(0.0..=horizon);
        let u1 = rng.random_range(-bound..=bound);
        let u2 = rng.random_range(-bound..=bound);
        let du = (u1 - u2).abs();
        if du == 0.0 {
            continue;
        }
        let f1 = spec.source.eval(&Bindings::new().t(t).u(u1))?;
        let f2 = spec.source.eval(&Bindings::new().t(t).u(u2))?;
        max_f = max_f.max((f1 - f2).abs() / du);
        let k1 = spec.kernel.eval(&Bindings::new().t(t).s(s).u(u1))?;
        let k2 = spec.kernel.eval(&Bindings::new().t(t).s(s).u(u2))?;
        max_k = max_k.max((k1 - k2).abs() / du);
    }
    Ok(SpotCheckReport {
        samples,
        bound,
        max_ratio_f: max_f,
        max_ratio_k: max_k,
        violation_f: max_f > spec.lipschitz_f + VIOLATION_SLACK,
        violation_k: max_k > spec.lipschitz_k + VIOLATION_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::FractionalOrder;

    fn spec(f: &str, k: &str, lf: f64, lk: f64) -> ProblemSpec {
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        ProblemSpec::new(order, 1.0, 9, "t", f, k, 0.0)
            .unwrap()
            .with_lipschitz(lf, lk)
            .unwrap()
    }

    #[test]
    fn exact_constant_is_not_a_violation() {
        let r = lipschitz_spot_check(&spec("0.5*u", "0", 0.5, 0.0), 500, 1).unwrap();
        assert!((r.max_ratio_f - 0.5).abs() < 1e-12);
        assert!(!r.any_violation());
    }

    #[test]
    fn quadratic_source_is_caught() {
        let r = lipschitz_spot_check(&spec("u^2", "0", 1.0, 0.0), 2000, 7).unwrap();
        assert!(r.violation_f);
        // |u1 + u2| ≤ 20
        assert!(
            r.max_ratio_f > 15.0 && r.max_ratio_f <= 20.0,
            "{}",
            r.max_ratio_f
        );
    }

    #[test]
    fn kernel_is_checked_too() {
        let r =
            lipschitz_spot_check(&spec("0", "0.1*cos(t - s)*sin(u)", 0.0, 0.05), 2000, 3).unwrap();
        assert!(r.violation_k);
        assert!(r.max_ratio_k <= 0.1 + 1e-12);
        let ok =
            lipschitz_spot_check(&spec("0", "0.1*cos(t - s)*sin(u)", 0.0, 0.1), 2000, 3).unwrap();
        assert!(!ok.any_violation());
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(lipschitz_spot_check(&spec("u", "0", 1.0, 0.0), 0, 1).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let s = spec("sin(u)*t", "exp(-s)*u", 1.0, 1.0);
        assert_eq!(
            lipschitz_spot_check(&s, 100, 42).unwrap(),
            lipschitz_spot_check(&s, 100, 42).unwrap()
        );
    }
}
