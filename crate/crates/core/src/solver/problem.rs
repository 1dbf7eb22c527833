use std::sync::Arc;

use crate::expr::{parse, Bindings, Expr, VarSet};
use crate::psi::{FractionalOrder, PsiGrid};

use super::SolverError;

/// Perturbation envelope selecting the stability notion being verified.
#[derive(Clone, Debug, PartialEq)]
pub enum Envelope {
    /// Hyers-Ulam-Rassias: `|residual(t)| ≤ Φ(t)` with `Φ > 0`.
    Phi(Expr),
    /// Hyers-Ulam: `|residual(t)| ≤ ε`.
    Epsilon(f64),
}

/// A complete problem instance.
///
/// `lipschitz_f` and `lipschitz_k` are asserted by the user; see
/// [`super::lipschitz_spot_check`] for a falsification test.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub order: FractionalOrder,
    pub horizon: f64,
    pub nodes: usize,
    /// `ψ(t)`
    pub psi: Expr,
    /// `f(t, u)`
    pub source: Expr,
    /// `k(t, s, u)`
    pub kernel: Expr,
    pub sigma: f64,
    pub lipschitz_f: f64,
    pub lipschitz_k: f64,
    pub envelope: Option<Envelope>,
    /// User-supplied `M`; used when larger than the grid estimate.
    pub m_override: Option<f64>,
}

impl ProblemSpec {
    /// Parses the three mandatory functions; Lipschitz constants default to
    /// zero and no envelope is set.
    pub fn new(
        order: FractionalOrder,
        horizon: f64,
        nodes: usize,
        psi: &str,
        source: &str,
        kernel: &str,
        sigma: f64,
    ) -> Result<Self, SolverError> {
        let spec = Self {
            order,
            horizon,
            nodes,
            psi: parse(psi, VarSet::T)?,
            source: parse(source, VarSet::TU)?,
            kernel: parse(kernel, VarSet::TSU)?,
            sigma,
            lipschitz_f: 0.0,
            lipschitz_k: 0.0,
            envelope: None,
            m_override: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_lipschitz(mut self, f: f64, k: f64) -> Result<Self, SolverError> {
        self.lipschitz_f = f;
        self.lipschitz_k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_phi(mut self, phi: &str) -> Result<Self, SolverError> {
        self.envelope = Some(Envelope::Phi(parse(phi, VarSet::T)?));
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self, SolverError> {
        self.envelope = Some(Envelope::Epsilon(epsilon));
        self.validate()?;
        Ok(self)
    }

    pub fn with_nodes(mut self, nodes: usize) -> Result<Self, SolverError> {
        self.nodes = nodes;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidProblem(msg));
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!(
                "T must be positive and finite, got {}",
                self.horizon
            ));
        }
        if self.nodes < 2 {
            return bad(format!("n must be at least 2, got {}", self.nodes));
        }
        if !self.sigma.is_finite() {
            return bad(format!("sigma must be finite, got {}", self.sigma));
        }
        for (name, v) in [("L_f", self.lipschitz_f), ("L_k", self.lipschitz_k)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if let Some(Envelope::Epsilon(e)) = self.envelope {
            if !(e >= 0.0 && e.is_finite()) {
                return bad(format!("epsilon must be finite and non-negative, got {e}"));
            }
        }
        if let Some(m) = self.m_override {
            if !(m > 0.0 && m.is_finite()) {
                return bad(format!("M must be positive and finite, got {m}"));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<PsiGrid>, SolverError> {
        Ok(Arc::new(PsiGrid::from_expr(
            self.horizon,
            self.nodes,
            &self.psi,
        )?))
    }

    pub fn psi_at(&self, t: f64) -> Result<f64, SolverError> {
        Ok(self.psi.eval(&Bindings::new().t(t))?)
    }

    /// `ψ(T) − ψ(0)`, evaluated directly from the expression.
    pub fn psi_span(&self) -> Result<f64, SolverError> {
        Ok(self.psi_at(self.horizon)? - self.psi_at(0.0)?)
    }

    /// First node where solution values are meaningful: node 0 is excluded
    /// when `γ < 1` because the prefactor blows up there.
    pub fn first_checked_node(&self) -> usize {
        usize::from(self.order.is_singular_at_origin())
    }
}
