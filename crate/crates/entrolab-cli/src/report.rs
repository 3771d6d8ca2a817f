use std::collections::BTreeMap;

use entrolab::models::{Family, KappaReport};
use entrolab::Phi;
use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Suite};

/// Bumped whenever a CSV header or a report field changes.
pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not run because a prerequisite suite failed.
    Gated,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    pub rows: usize,
    pub summary: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub label: String,
    pub family: Family,
    pub n_states: usize,
    pub n_transitions: usize,
    pub kappa: KappaReport,
}

/// Theorem constant next to its empirical counterparts for one `φ`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantRow {
    pub phi: Phi,
    pub kappa_claimed: f64,
    pub kappa_best: Option<f64>,
    pub kappa_decay: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub artifact_version: String,
    /// The effective configuration, without the output directory.
    pub config: ExperimentConfig,
    pub model: ModelSummary,
    pub hypotheses_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_hypothesis: Option<String>,
    pub csv_schemas: BTreeMap<String, Vec<String>>,
    pub suites: Vec<SuiteResult>,
    pub constants: Vec<ConstantRow>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Exit status of a completed run: 2 when the model's hypotheses fail,
/// otherwise 1 when any suite fails or is gated, otherwise 0.
pub fn exit_code(hypotheses_ok: bool, suites: &[SuiteResult]) -> i32 {
    if !hypotheses_ok {
        2
    } else if suites.iter().any(|s| s.status != Status::Pass) {
        1
    } else {
        0
    }
}
