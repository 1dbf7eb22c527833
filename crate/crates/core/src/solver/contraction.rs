use serde::Serialize;

use crate::psi::gamma;

use super::ProblemSpec;

/// How the contraction constant `q` is formed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContractionMode {
    /// Weighted metric with envelope Φ: `q = M·L_f + M²·L_k`.
    Rassias { m: f64 },
    /// Plain sup metric: `q = (ψ(T)−ψ(0))^α / Γ(α+1) · (L_f + T/2 · L_k)`.
    Ulam { psi_span: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    /// The constant `M` entering `q` (the HU analogue in Ulam mode).
    pub m: f64,
    pub q: f64,
    /// `0 ≤ q < 1`; `q = 0` (no coupling at all) counts as contractive.
    pub satisfied: bool,
}

pub fn contraction_check(spec: &ProblemSpec, mode: ContractionMode) -> ContractionReport {
    let (lf, lk) = (spec.lipschitz_f, spec.lipschitz_k);
    let (m, q) = match mode {
        ContractionMode::Rassias { m } => (m, m * lf + m * m * lk),
        ContractionMode::Ulam { psi_span } => {
            let alpha = spec.order.alpha();
            let m = psi_span.powf(alpha) / gamma(alpha + 1.0);
            (m, m * (lf + 0.5 * spec.horizon * lk))
        }
    };
    ContractionReport {
        m,
        q,
        satisfied: q.is_finite() && (0.0..1.0).contains(&q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::FractionalOrder;

    fn spec(lf: f64, lk: f64) -> ProblemSpec {
        let order = FractionalOrder::new(0.5, 1.0).unwrap();
        ProblemSpec::new(order, 1.0, 9, "t", "0", "0", 0.0)
            .unwrap()
            .with_lipschitz(lf, lk)
            .unwrap()
    }

    #[test]
    fn rassias_arithmetic() {
        let r = contraction_check(&spec(0.1, 0.05), ContractionMode::Rassias { m: 0.8427 });
        let expected = 0.8427 * 0.1 + 0.8427 * 0.8427 * 0.05;
        assert!((r.q - expected).abs() < 1e-15);
        assert!((r.q - 0.119_777_6).abs() < 1e-6);
        assert!(r.satisfied);
    }

    #[test]
    fn zero_lipschitz_counts_as_contractive() {
        let r = contraction_check(&spec(0.0, 0.0), ContractionMode::Rassias { m: 3.0 });
        assert_eq!(r.q, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn ulam_arithmetic() {
        let r = contraction_check(&spec(0.2, 0.1), ContractionMode::Ulam { psi_span: 1.0 });
        // Γ(1.5) = √π/2
        let expected = 0.25 / (std::f64::consts::PI.sqrt() / 2.0);
        assert!((r.q - expected).abs() < 1e-14);
        assert!((r.q - 0.282_09).abs() < 1e-5);
        assert!(r.satisfied);
        let big = contraction_check(&spec(2.0, 0.0), ContractionMode::Ulam { psi_span: 1.0 });
        assert!(!big.satisfied);
    }
}
