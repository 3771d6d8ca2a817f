use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, Suite};
use crate::error::CliError;
use crate::lock::OutputLock;
use crate::report::{
    exit_code, ConstantRow, ModelSummary, RunReport, Status, SuiteResult, ARTIFACT_VERSION, SCHEMA_VERSION,
};
use crate::suites::{columns, run_suite, Ctx, SuiteOutput};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub out_dir: PathBuf,
    /// Wall-clock seconds per suite, kept out of the report.
    pub timings: BTreeMap<String, f64>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }
}

fn write_csv(path: &Path, suite: Suite, out: &SuiteOutput) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(columns(suite))?;
    for row in &out.rows {
        w.write_record(row.iter().map(|c| c.render()))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn timed(suite: Suite, ctx: &Ctx) -> (entrolab::Result<SuiteOutput>, f64) {
    let start = Instant::now();
    let r = run_suite(suite, ctx);
    (r, start.elapsed().as_secs_f64())
}

/// Runs the configured suites and writes `report.json`, `timings.json` and
/// one CSV per executed suite into the output directory.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let mut config = config.clone();
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    let out_dir = opts
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| CliError::config("output_dir", "no output directory in the config or on the command line"))?;
    config.output_dir = None;
    config.validate()?;
    let model = config.build_model()?;
    fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let _lock = OutputLock::acquire(&out_dir)?;
    let start = Instant::now();

    let ctx = Ctx { model: &model, phis: &config.phi_list, samples: config.samples, seed: config.seed, t_grid: &config.t_grid };
    let requested = config.ordered_suites();
    let mut results: BTreeMap<Suite, (entrolab::Result<SuiteOutput>, f64)> = BTreeMap::new();
    // The gate suites always run; they are only reported when requested.
    // A model outside its hypotheses may carry negative merging rates, so
    // then only reversibility gates and the unproven constant is still tested.
    let mut gate_ok = true;
    let mut gate_failure = None;
    for suite in [Suite::Reversibility, Suite::Admissibility] {
        let r = timed(suite, &ctx);
        let gates = suite == Suite::Reversibility || model.kappa.hypotheses_ok;
        let ok = !gates || matches!(&r.0, Ok(o) if o.passed);
        if !ok && gate_failure.is_none() {
            gate_failure = Some(suite);
        }
        gate_ok &= ok;
        if requested.contains(&suite) {
            results.insert(suite, r);
        }
    }
    let rest: Vec<Suite> = requested.iter().copied().filter(|s| !s.is_gate()).collect();
    if gate_ok {
        let outs: Vec<_> = rest.par_iter().map(|&s| timed(s, &ctx)).collect();
        results.extend(rest.iter().copied().zip(outs));
    }

    let mut timings = BTreeMap::new();
    let mut suites = Vec::new();
    for suite in requested {
        let Some((r, secs)) = results.remove(&suite) else {
            suites.push(SuiteResult {
                suite,
                status: Status::Gated,
                csv: None,
                rows: 0,
                summary: BTreeMap::new(),
                witness: None,
                note: gate_failure.map(|g| format!("{g} failed")),
                error: None,
            });
            continue;
        };
        timings.insert(suite.name().to_string(), secs);
        suites.push(match r {
            Ok(out) => {
                let name = format!("{}.csv", suite.name());
                write_csv(&out_dir.join(&name), suite, &out)?;
                SuiteResult {
                    suite,
                    status: if out.passed { Status::Pass } else { Status::Fail },
                    csv: Some(name),
                    rows: out.rows.len(),
                    summary: out.summary,
                    witness: out.witness,
                    note: out.note,
                    error: None,
                }
            }
            Err(e) => SuiteResult {
                suite,
                status: Status::Fail,
                csv: None,
                rows: 0,
                summary: BTreeMap::new(),
                witness: None,
                note: None,
                error: Some(e.to_string()),
            },
        });
    }

    let lookup = |key: &str| suites.iter().find_map(|s| s.summary.get(key).copied());
    let constants = config
        .phi_list
        .iter()
        .map(|phi| ConstantRow {
            phi: phi.clone(),
            kappa_claimed: model.kappa.implied.for_phi(phi),
            kappa_best: lookup(&format!("kappa_best[{phi}]")),
            kappa_decay: lookup(&format!("kappa_decay_fit[{phi}]")),
        })
        .collect();
    let csv_schemas =
        Suite::ALL.iter().map(|&s| (s.name().to_string(), columns(s).iter().map(|c| c.to_string()).collect())).collect();
    let code = exit_code(model.kappa.hypotheses_ok, &suites);
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION.to_string(),
        model: ModelSummary {
            label: model.label.clone(),
            family: model.family,
            n_states: model.generator.n_states(),
            n_transitions: model.generator.n_transitions(),
            kappa: model.kappa.clone(),
        },
        hypotheses_ok: model.kappa.hypotheses_ok,
        failed_hypothesis: model.kappa.failed_hypothesis.clone(),
        config,
        csv_schemas,
        suites,
        constants,
        exit_code: code,
    };
    write_file(&out_dir.join("report.json"), &report.to_json())?;
    timings.insert("total".into(), start.elapsed().as_secs_f64());
    let mut t = serde_json::to_string_pretty(&timings).expect("timings serialize");
    t.push('\n');
    write_file(&out_dir.join("timings.json"), &t)?;
    Ok(RunOutcome { report, out_dir, timings })
}
