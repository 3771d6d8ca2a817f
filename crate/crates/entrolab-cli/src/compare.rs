use std::fmt::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::CliError;
use crate::report::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub model: String,
    pub phi: String,
    pub kappa_claimed: f64,
    pub kappa_best: Option<f64>,
    pub kappa_decay: Option<f64>,
}

impl CompareRow {
    /// Best-constant estimate minus the theorem constant.
    pub fn margin(&self) -> Option<f64> {
        self.kappa_best.map(|b| b - self.kappa_claimed)
    }
}

fn bad(path: &Path, message: &str) -> CliError {
    CliError::BadReport { path: path.to_path_buf(), message: message.into() }
}

fn read_row(path: &Path) -> Result<CompareRow, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| bad(path, &e.to_string()))?;
    let version = v.get("schema_version");
    if version.and_then(Value::as_u64) != Some(SCHEMA_VERSION as u64) {
        return Err(CliError::SchemaMismatch {
            path: path.to_path_buf(),
            found: version.map_or("none".into(), |x| x.to_string()),
            expected: SCHEMA_VERSION,
        });
    }
    let model = v.pointer("/model/label").and_then(Value::as_str).ok_or_else(|| bad(path, "missing model label"))?;
    let first = v.pointer("/constants/0").ok_or_else(|| bad(path, "no constants"))?;
    let phi = first.get("phi").ok_or_else(|| bad(path, "missing phi"))?;
    let num = |k: &str| first.get(k).and_then(Value::as_f64);
    Ok(CompareRow {
        model: model.to_string(),
        phi: match phi {
            Value::Number(a) => format!("phi_{a}"),
            other => other.to_string(),
        },
        kappa_claimed: num("kappa_claimed").ok_or_else(|| bad(path, "missing kappa_claimed"))?,
        kappa_best: num("kappa_best"),
        kappa_decay: num("kappa_decay"),
    })
}

/// One row per report, built from its first `φ`.
pub fn compare(paths: &[PathBuf]) -> Result<Vec<CompareRow>, CliError> {
    if paths.is_empty() {
        return Err(CliError::config("reports", "at least one report is required"));
    }
    paths.iter().map(|p| read_row(p)).collect()
}

fn opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.6}"))
}

pub fn render_table(rows: &[CompareRow]) -> String {
    let header = ["model", "phi", "kappa_claimed", "kappa_best", "kappa_decay_fit", "margin"];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                r.phi.clone(),
                format!("{:.6}", r.kappa_claimed),
                opt(r.kappa_best),
                opt(r.kappa_decay),
                opt(r.margin()),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, row: &[&str]| {
        let parts: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header);
    for row in &cells {
        line(&mut out, &row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}
