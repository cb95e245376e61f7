use std::path::{Path, PathBuf};
use std::sync::Arc;

use nclp_core::algebra::{Algebra, Block};
use nclp_core::centralizers::NCCentralizer;
use nclp_core::commutative::CommCentralizer;
use nclp_core::interpolation::Sampling;
use nclp_core::twisted_sum::Grid;
use nclp_core::ScalarFn;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const EXPERIMENTS: [&str; 9] = [
    "norms",
    "centralizer-constants",
    "nontriviality",
    "duality",
    "inequality-grid",
    "kosaki",
    "change-of-state",
    "derivative-bound",
    "lift-consistency",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    pub blocks: Vec<Block>,
}

impl AlgebraConfig {
    pub fn build(&self) -> Result<Arc<Algebra>, CliError> {
        Algebra::new(self.blocks.clone()).map_err(|e| CliError::invalid("algebra", e))
    }
}

/// `{kind, p, phi}`; `p` defaults to the experiment exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralizerConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<ScalarFn>,
}

impl CentralizerConfig {
    pub fn build(&self, default_p: f64) -> Result<NCCentralizer, CliError> {
        let p = self.p.unwrap_or(default_p);
        let phi =
            || self.phi.clone().ok_or_else(|| CliError::Invalid(format!("centralizer `{}` needs `phi`", self.kind)));
        Ok(match self.kind.as_str() {
            "omega_p" => NCCentralizer::OmegaP { p },
            "lipschitz" => NCCentralizer::Lipschitz { p, phi: phi()? },
            "phi_plus" => NCCentralizer::PhiPlus { p },
            "phi_minus" => NCCentralizer::PhiMinus { p },
            "lifted_kalton_peck" => NCCentralizer::Lifted { inner: CommCentralizer::KaltonPeck { p } },
            "lifted_lipschitz" => NCCentralizer::Lifted { inner: CommCentralizer::Lipschitz { p, phi: phi()? } },
            other => {
                return Err(CliError::Invalid(format!(
                    "unknown centralizer kind `{other}` (expected omega_p, lipschitz, phi_plus, phi_minus, lifted_kalton_peck, lifted_lipschitz)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// One experiment run; every field except `experiment` and `seed` has a per-experiment default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centralizer: Option<CentralizerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couple: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl ExperimentConfig {
    /// Parses TOML or JSON according to the file extension.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string())),
            Some("toml") => toml::from_str(&text).map_err(|e| CliError::Parse(e.to_string())),
            _ => Err(CliError::Parse(format!("{}: expected a .toml or .json config", path.display()))),
        }
    }

    /// The exponents to run: `exponents`, else `[p]`, else `default`.
    pub fn exponents_or(&self, default: &[f64]) -> Vec<f64> {
        match (&self.exponents, self.p) {
            (Some(e), _) => e.clone(),
            (None, Some(p)) => vec![p],
            (None, None) => default.to_vec(),
        }
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    /// Checks everything that does not depend on the experiment.
    pub fn validate(&self) -> Result<(), CliError> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(CliError::UnknownExperiment(self.experiment.clone()));
        }
        for &p in self.exponents.iter().flatten().chain(self.p.iter()) {
            if !(p > 1.0 && p.is_finite()) {
                return Err(CliError::Invalid(format!("exponent {p} must lie in (1, inf)")));
            }
        }
        if self.exponents.as_ref().is_some_and(|e| e.is_empty()) {
            return Err(CliError::Invalid("`exponents` must not be empty".into()));
        }
        if self.trials == Some(0) {
            return Err(CliError::Invalid("`trials` must be at least 1".into()));
        }
        if let Some(sizes) = &self.sizes {
            if sizes.is_empty() || sizes.contains(&0) {
                return Err(CliError::Invalid("`sizes` must be nonempty and positive".into()));
            }
        }
        if let Some(t) = self.theta {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Invalid(format!("theta = {t} must lie in (0, 1)")));
            }
        }
        if let Some(g) = &self.grid {
            if !(g.points > 0 && g.lo > 0.0 && g.hi >= g.lo && g.hi.is_finite()) {
                return Err(CliError::Invalid(format!("grid needs points > 0 and 0 < lo <= hi, got {g:?}")));
            }
        }
        if let Some(s) = &self.sampling {
            if !(s.t_step > 0.0 && s.t_max >= 0.0 && s.t_max.is_finite()) {
                return Err(CliError::Invalid(format!("sampling needs t_step > 0 and t_max >= 0, got {s:?}")));
            }
        }
        if let Some(c) = &self.couple {
            if !["M_L1", "kosaki_left", "kosaki_right"].contains(&c.as_str()) {
                return Err(CliError::Invalid(format!(
                    "unknown couple `{c}` (expected M_L1, kosaki_left, kosaki_right)"
                )));
            }
        }
        if let Some(a) = &self.algebra {
            a.build()?;
        }
        if let Some(c) = &self.centralizer {
            c.build(self.p.unwrap_or(2.0))?;
            if let Some(p) = c.p {
                if !(p > 1.0 && p.is_finite()) {
                    return Err(CliError::Invalid(format!("centralizer exponent {p} must lie in (1, inf)")));
                }
            }
        }
        Ok(())
    }
}
