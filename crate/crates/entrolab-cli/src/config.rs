use std::fmt;
use std::path::{Path, PathBuf};

use entrolab::models::{ModelInstance, ModelSpec};
use entrolab::Phi;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Verification suites, declared in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "reversibility")]
    Reversibility,
    #[serde(rename = "admissibility")]
    Admissibility,
    #[serde(rename = "constants")]
    Constants,
    #[serde(rename = "csi")]
    Csi,
    #[serde(rename = "decay")]
    Decay,
    #[serde(rename = "convexity")]
    Convexity,
    #[serde(rename = "lemmaA1")]
    PhiInequalities,
    #[serde(rename = "cancellation")]
    Cancellation,
    #[serde(rename = "wasserstein")]
    Wasserstein,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Reversibility,
        Suite::Admissibility,
        Suite::Constants,
        Suite::Csi,
        Suite::Decay,
        Suite::Convexity,
        Suite::PhiInequalities,
        Suite::Cancellation,
        Suite::Wasserstein,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Reversibility => "reversibility",
            Suite::Admissibility => "admissibility",
            Suite::Constants => "constants",
            Suite::Csi => "csi",
            Suite::Decay => "decay",
            Suite::Convexity => "convexity",
            Suite::PhiInequalities => "lemmaA1",
            Suite::Cancellation => "cancellation",
            Suite::Wasserstein => "wasserstein",
        }
    }

    /// Suites whose failure gates the rest.
    pub fn is_gate(self) -> bool {
        matches!(self, Suite::Reversibility | Suite::Admissibility)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_phis() -> Vec<Phi> {
    vec![Phi::log(), Phi::Alpha(1.5), Phi::quadratic()]
}

fn default_samples() -> usize {
    100
}

fn default_t_grid() -> Vec<f64> {
    vec![0.05, 0.1, 0.25, 0.5, 1.0, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub suites: Vec<Suite>,
    #[serde(default = "default_phis")]
    pub phi_list: Vec<Phi>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses and validates; errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<ExperimentConfig, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        ExperimentConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.suites.is_empty() {
            return Err(CliError::config("suites", "at least one suite is required"));
        }
        for (k, s) in self.suites.iter().enumerate() {
            if self.suites[..k].contains(s) {
                return Err(CliError::config(format!("suites[{k}]"), format!("duplicate suite {s}")));
            }
        }
        if self.samples == 0 {
            return Err(CliError::config("samples", "must be at least 1"));
        }
        if self.phi_list.is_empty() {
            return Err(CliError::config("phi_list", "at least one entry is required"));
        }
        for (k, phi) in self.phi_list.iter().enumerate() {
            phi.validate().map_err(|e| CliError::config(format!("phi_list[{k}]"), e))?;
        }
        if self.t_grid.is_empty() {
            return Err(CliError::config("t_grid", "at least one time is required"));
        }
        if let Some(k) = self.t_grid.iter().position(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(CliError::config(format!("t_grid[{k}]"), "times must be positive and finite"));
        }
        if let Some(k) = self.t_grid.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(CliError::config(format!("t_grid[{}]", k + 1), "times must be strictly increasing"));
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<ModelInstance, CliError> {
        self.model.build().map_err(|e| CliError::config("model", e))
    }

    /// Requested suites in execution order.
    pub fn ordered_suites(&self) -> Vec<Suite> {
        let mut s = self.suites.clone();
        s.sort();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BL: &str = r#"{"family":"bernoulli_laplace","params":{"L":4,"N":2}}"#;

    fn parse(body: &str) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::from_json(&format!(r#"{{"model":{BL},{body}}}"#))
    }

    fn error_path(body: &str) -> String {
        match parse(body) {
            Err(CliError::Config { path, .. }) => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_fill_in() {
        let c = parse(r#""suites":["csi","reversibility"]"#).unwrap();
        assert_eq!(c.samples, 100);
        assert_eq!(c.phi_list.len(), 3);
        assert_eq!(c.ordered_suites(), vec![Suite::Reversibility, Suite::Csi]);
        let c = parse(r#""suites":["lemmaA1"],"phi_list":[1.25,{"mix":[[1.0,0.5],[2.0,0.5]]}]"#).unwrap();
        assert_eq!(c.phi_list[0], Phi::Alpha(1.25));
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(error_path(r#""suites":["csi"],"samples":-3"#), "samples");
        assert_eq!(error_path(r#""suites":["csi"],"samples":0"#), "samples");
        assert_eq!(error_path(r#""suites":[]"#), "suites");
        assert_eq!(error_path(r#""suites":["csi","csi"]"#), "suites[1]");
        assert_eq!(error_path(r#""suites":["bogus"]"#), "suites[0]");
        assert_eq!(error_path(r#""suites":["csi"],"t_grid":[0.5,0.1]"#), "t_grid[1]");
        assert_eq!(error_path(r#""suites":["csi"],"phi_list":[3.0]"#), "phi_list[0]");
        assert_eq!(error_path(r#""suites":["csi"],"colour":1"#), "colour");
    }
}
