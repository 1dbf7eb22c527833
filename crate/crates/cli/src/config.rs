//! Problem files: strict JSON documents describing one problem instance.

use std::path::Path;

use frac_core::psi::FractionalOrder;
use frac_core::solver::{ProblemSpec, DEFAULT_MAX_ITER, DEFAULT_TOL};
use frac_core::stability::VerifyConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub order: OrderSection,
    pub domain: DomainSection,
    pub functions: FunctionsSection,
    pub constants: ConstantsSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSection {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsSection {
    pub psi: String,
    pub f: String,
    pub k: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub sigma: f64,
    #[serde(rename = "L_f")]
    pub lipschitz_f: f64,
    #[serde(rename = "L_k")]
    pub lipschitz_k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Optional user-supplied `M` for the Rassias mode.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_perturbations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated problem ready to run.
#[derive(Clone, Debug)]
pub struct LoadedProblem {
    pub spec: ProblemSpec,
    pub tol: f64,
    pub max_iter: usize,
    pub verify: VerifyConfig,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|message| CliError::Schema {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Parses every expression, checks ranges and builds the grid once so
    /// that a bad `psi` is reported as an input error.
    pub fn build(&self) -> Result<LoadedProblem, CliError> {
        let input = |e: &dyn std::fmt::Display| CliError::Input(e.to_string());
        let order =
            FractionalOrder::new(self.order.alpha, self.order.beta).map_err(|e| input(&e))?;
        let c = &self.constants;
        let fns = &self.functions;
        let mut spec = ProblemSpec::new(
            order,
            self.domain.horizon,
            self.domain.n,
            &fns.psi,
            &fns.f,
            &fns.k,
            c.sigma,
        )
        .and_then(|s| s.with_lipschitz(c.lipschitz_f, c.lipschitz_k))
        .map_err(|e| input(&e))?;
        match (&fns.phi, c.epsilon) {
            (Some(_), Some(_)) => {
                return Err(CliError::Input(
                    "functions.phi and constants.epsilon are mutually exclusive".into(),
                ))
            }
            (Some(phi), None) => spec = spec.with_phi(phi).map_err(|e| input(&e))?,
            (None, Some(eps)) => spec = spec.with_epsilon(eps).map_err(|e| input(&e))?,
            (None, None) => {}
        }
        if let Some(m) = c.m {
            if fns.phi.is_none() {
                return Err(CliError::Input(
                    "constants.M only applies together with functions.phi".into(),
                ));
            }
            spec.m_override = Some(m);
        }
        spec.validate().map_err(|e| input(&e))?;
        spec.grid().map_err(|e| input(&e))?;

        let tol = self.solver.tol.unwrap_or(DEFAULT_TOL);
        let max_iter = self.solver.max_iter.unwrap_or(DEFAULT_MAX_ITER);
        if !(tol > 0.0 && tol.is_finite()) || max_iter == 0 {
            return Err(CliError::Input(format!(
                "solver.tol must be positive and solver.max_iter at least 1 (got {tol}, {max_iter})"
            )));
        }
        let defaults = VerifyConfig::default();
        let verify = VerifyConfig {
            num_perturbations: self
                .verify
                .num_perturbations
                .unwrap_or(defaults.num_perturbations),
            seed: self.verify.seed.unwrap_or(defaults.seed),
            tol,
            max_iter,
        };
        Ok(LoadedProblem {
            spec,
            tol,
            max_iter,
            verify,
        })
    }
}
