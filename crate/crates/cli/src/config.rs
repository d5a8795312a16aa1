//! Run configuration, read from TOML. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use orlicz_core::{Check, Family, FamilyKind, FamilySpec, NFunction};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub family: String,
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "yes")]
    pub normalize: bool,
}

fn yes() -> bool {
    true
}

impl PhiSpec {
    pub fn build(&self) -> Result<NFunction, CliError> {
        let family = Family::parse(&self.family)?;
        Ok(NFunction::new(family, self.alpha, self.beta, self.gamma, self.normalize)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: String,
    pub count: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_ratio_rel")]
    pub ratio_rel: f64,
}

fn default_ratio_rel() -> f64 {
    orlicz_core::sampling::RATIO_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ratio_rel: default_ratio_rel(),
        }
    }
}

/// Lemma 2 integral conditions. Missing `sigma`/`gamma` are pre-scanned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsConfig {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl Default for ConditionsConfig {
    fn default() -> Self {
        ConditionsConfig {
            p: 4.0,
            sigma: None,
            gamma: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingFnConfig {
    pub t_min: f64,
    pub t_points: usize,
    pub x_points: usize,
}

impl Default for SamplingFnConfig {
    fn default() -> Self {
        SamplingFnConfig {
            t_min: 1e-6,
            t_points: 200,
            x_points: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletConfig {
    /// Table rows for `n = 0..=n_max`.
    pub n_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub phis: Vec<PhiSpec>,
    pub degrees: Vec<usize>,
    pub family: FamilyConfig,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_cphi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling_fn: Option<SamplingFnConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirichlet: Option<DirichletConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.degrees.contains(&0) {
            return Err(CliError::Usage("degrees must be positive".into()));
        }
        if self.family.count == 0 {
            return Err(CliError::Usage("family.count must be at least 1".into()));
        }
        if !(self.tolerances.ratio_rel >= 0.0) {
            return Err(CliError::Usage("tolerances.ratio_rel must be non-negative".into()));
        }
        if let Some(c) = self.claimed_cphi {
            if !(c > 0.0 && c.is_finite()) {
                return Err(CliError::Usage("claimed_cphi must be positive".into()));
            }
        }
        self.checks()?;
        self.family_spec()?;
        self.nfunctions()?;
        Ok(())
    }

    pub fn checks(&self) -> Result<Vec<Check>, CliError> {
        let mut out = Vec::new();
        for c in &self.checks {
            let c = Check::parse(c)?;
            if !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(out)
    }

    pub fn family_spec(&self) -> Result<FamilySpec, CliError> {
        Ok(FamilySpec {
            kind: FamilyKind::parse(&self.family.kind)?,
            count: self.family.count,
            seed: self.family.seed,
        })
    }

    pub fn nfunctions(&self) -> Result<Vec<NFunction>, CliError> {
        self.phis.iter().map(PhiSpec::build).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULT: &str = include_str!("../../../configs/default.toml");

    #[test]
    fn shipped_config_round_trips() {
        let cfg = RunConfig::parse(DEFAULT).unwrap();
        assert_eq!(cfg.phis.len(), 4);
        let again = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn optional_sections_round_trip() {
        let mut cfg = RunConfig::parse(DEFAULT).unwrap();
        cfg.claimed_cphi = Some(0.1 + 0.2);
        cfg.conditions = Some(ConditionsConfig { p: 3.0, sigma: Some(1.0), gamma: None });
        cfg.sampling_fn = Some(SamplingFnConfig::default());
        cfg.dirichlet = Some(DirichletConfig { n_max: 16 });
        cfg.tolerances.ratio_rel = 1e-9;
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let extra = format!("{DEFAULT}\nbogus = 1\n");
        assert!(RunConfig::parse(&extra).is_err());
        assert!(RunConfig::parse(&DEFAULT.replace("\"zygmund\"", "\"zigmund\"")).is_err());
        assert!(RunConfig::parse(&DEFAULT.replace("count = 100", "count = 0")).is_err());
        assert!(RunConfig::parse(&DEFAULT.replace("[4, 16, 64]", "[0, 4]")).is_err());
        assert!(RunConfig::parse(&DEFAULT.replace("\"mixed\"", "\"uniform\"")).is_err());
        assert!(RunConfig::parse("phis = []").is_err());
    }
}
