use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_entrolab"));
    c.env_remove("ENTROLAB_JOBS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_config(name: &str, out: &Path) -> Output {
    bin().arg("run").arg(configs().join(name)).arg("--out").arg(out).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn full_run_writes_every_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("bernoulli_laplace.json", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csvs = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    assert_eq!(csvs, 9);
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("timings.json").exists());
    assert!(!dir.path().join(".entrolab.lock").exists());
}

#[test]
fn failed_hypothesis_exits_two_and_still_tests_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config("curie_weiss_hot.json", dir.path());
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("hypothesis not satisfied"), "{out}");
    assert!(dir.path().join("csi.csv").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["hypotheses_ok"], false);
    assert!(report["failed_hypothesis"].is_string());
}

#[test]
fn invalid_config_exits_64_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"model":{"family":"bernoulli_laplace","params":{"L":4,"N":2}},"samples":-3}"#).unwrap();
    let o = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("samples"));
}

#[test]
fn compare_tabulates_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["bernoulli_laplace", "hardcore", "zero_range"] {
        let out = dir.path().join(name);
        let o = run_config(&format!("{name}.json"), &out);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        reports.push(out.join("report.json"));
    }
    let o = bin().arg("compare").args(&reports).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let rows = entrolab_cli::compare(&reports).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.margin().unwrap() >= 0.0, "{r:?}");
    }
    let table = stdout(&o);
    assert!(table.lines().count() >= 4, "{table}");
}

#[test]
fn compare_rejects_other_schema_versions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bl");
    run_config("bernoulli_laplace.json", &out);
    let path = out.join("report.json");
    let mut report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    report["schema_version"] = 99.into();
    std::fs::write(&path, report.to_string()).unwrap();
    let o = bin().arg("compare").arg(&path).output().unwrap();
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn held_lock_exits_75() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join(".entrolab.lock"), "").unwrap();
    let o = run_config("bernoulli_laplace.json", dir.path());
    assert_eq!(o.status.code(), Some(75));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn jobs_environment_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("ENTROLAB_JOBS", "two")
        .arg("run")
        .arg(configs().join("bernoulli_laplace.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
    let o = bin()
        .env("ENTROLAB_JOBS", "1")
        .args(["run", "--jobs", "4"])
        .arg(configs().join("bernoulli_laplace.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn constants_prints_json() {
    let o = bin().arg("constants").arg(configs().join("bernoulli_laplace.json")).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kappa"], 4.0);
}
