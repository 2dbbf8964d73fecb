use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holonomy_core::canonical::{build_canonical, PencilSpec};
use holonomy_core::realize::{realize, MetricExport, QuadraticMetric};
use serde_json::Value;
use tempfile::TempDir;

fn holonomy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy")).args(args).output().expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, blocks: &[(usize, i64)]) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, PencilSpec::nilpotent(blocks).unwrap().to_json()).unwrap();
    path
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn two_block_spec_passes_every_stage() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "pair.json", &[(1, 1), (2, 1)]);
    let out = dir.path().join("report.json");
    let metric = dir.path().join("metric.json");
    let run = holonomy(&["verify", "--input", s(&spec), "--out", s(&out), "--metric-out", s(&metric)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["stages"]["berger"]["dim_gL"], 1);
    assert_eq!(report["stages"]["probe"]["span_rank"], 1);
    assert_eq!(report["stages"]["probe"]["dim_gL"], 1);
    assert!(report["stages"]["probe"]["samples"].as_array().unwrap().len() >= 3);

    let export: MetricExport = serde_json::from_str(&fs::read_to_string(&metric).unwrap()).unwrap();
    let expected = realize(&build_canonical(&PencilSpec::nilpotent(&[(1, 1), (2, 1)]).unwrap())).1;
    assert_eq!(QuadraticMetric::from_export(&export).unwrap(), expected);
}

#[test]
fn regular_spec_is_flat() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "regular.json", &[(3, 1)]);
    let run = holonomy(&["verify", "--input", s(&spec)]);
    assert_eq!(run.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["stages"]["berger"]["dim_gL"], 0);
    assert_eq!(report["stages"]["realize"]["curvature_rank"], 0);
    assert_eq!(report["stages"]["probe"]["span_rank"], 0);
}

#[test]
fn invalid_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let dup = dir.path().join("dup.json");
    fs::write(
        &dup,
        r#"{"eigenvalues":[{"lambda":"1","blocks":[{"size":1,"sign":1}]},{"lambda":"1","blocks":[{"size":2,"sign":-1}]}]}"#,
    )
    .unwrap();
    assert_eq!(holonomy(&["verify", "--input", s(&dup)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(holonomy(&["verify", "--input", s(&missing)]).status.code(), Some(2));
    let spec = write_spec(dir.path(), "ok.json", &[(2, 1)]);
    assert_eq!(holonomy(&["verify", "--input", s(&spec), "--stages", "bogus"]).status.code(), Some(2));
    assert_eq!(holonomy(&["verify", "--input", s(&spec), "--membership-tol", "0"]).status.code(), Some(2));
    assert_eq!(holonomy(&["corpus", "--max-n", "1", "--out", s(dir.path())]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_holonomy"))
        .args(["verify", "--input", s(&spec)])
        .env("HOLONOMY_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn stage_subset_and_determinism() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "s.json", &[(1, 1), (1, -1), (2, 1)]);
    let run = holonomy(&["verify", "--input", s(&spec), "--stages", "berger,canonical"]);
    assert_eq!(run.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert!(report["stages"].get("realize").is_none());
    assert!(report["stages"].get("probe").is_none());
    assert_eq!(report["stages"]["berger"]["image_rank"], 3);

    let first = holonomy(&["verify", "--input", s(&spec), "--seed", "5"]);
    let second = Command::new(env!("CARGO_BIN_EXE_holonomy"))
        .args(["verify", "--input", s(&spec), "--seed", "5"])
        .env("HOLONOMY_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn corpus_naming_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let run = holonomy(&["corpus", "--max-n", "2", "--out", s(dir.path())]);
    assert_eq!(run.status.code(), Some(0));
    let mut names: Vec<String> =
        fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["n2_p11_s++.json", "n2_p11_s+-.json", "n2_p2_s+.json"]);

    let dir3 = TempDir::new().unwrap();
    holonomy(&["corpus", "--max-n", "3", "--out", s(dir3.path())]);
    let mut partitions: Vec<String> = fs::read_dir(dir3.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("n3_"))
        .map(|n| n.split('_').nth(1).unwrap().to_string())
        .collect();
    partitions.sort();
    partitions.dedup();
    assert_eq!(partitions, ["p111", "p12", "p3"]);
    for entry in fs::read_dir(dir3.path()).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        assert!(PencilSpec::from_json(&text).is_ok());
    }
}

#[test]
fn batch_verify_and_report() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("corpus");
    let reports = dir.path().join("reports");
    holonomy(&["corpus", "--max-n", "4", "--out", s(&corpus)]);
    let run = holonomy(&["verify", "--input", s(&corpus), "--out", s(&reports)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));

    let mut files: Vec<PathBuf> = fs::read_dir(&reports).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 19);
    let args: Vec<&str> = ["report"].into_iter().chain(files.iter().map(|p| s(p))).collect();
    let table = holonomy(&args);
    assert_eq!(table.status.code(), Some(0));
    let text = String::from_utf8(table.stdout).unwrap();
    assert_eq!(text.lines().count(), 20);
    assert!(text.lines().skip(1).all(|l| l.trim_end().ends_with("pass")));

    // flip one report to failing; it must sort first and the exit becomes 1
    let victim = files[5].clone();
    let mut report = json(&victim);
    report["passed"] = Value::Bool(false);
    fs::write(&victim, serde_json::to_string(&report).unwrap()).unwrap();
    let csv = dir.path().join("summary.csv");
    let mixed = holonomy(&["report", s(&files[0]), s(&victim), "--csv", s(&csv)]);
    assert_eq!(mixed.status.code(), Some(1));
    let first_row = String::from_utf8(mixed.stdout).unwrap().lines().nth(1).unwrap().to_string();
    assert!(first_row.starts_with(victim.file_stem().unwrap().to_str().unwrap()));
    let csv_text = fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("file,name,n,partition,signs,dim_gL"));
    assert_eq!(csv_text.lines().count(), 3);

    let unreadable = holonomy(&["report", s(&dir.path().join("absent.json")), s(&files[0])]);
    assert_eq!(unreadable.status.code(), Some(2));
    assert!(String::from_utf8(unreadable.stdout).unwrap().lines().nth(1).unwrap().contains("error"));

    let empty = holonomy(&["report"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);
}
