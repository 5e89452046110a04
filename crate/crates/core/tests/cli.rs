use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn sscap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sscap")).args(args).output().unwrap()
}

fn run_in(out: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    let out = out.display().to_string();
    all.extend(["--seed", "11", "--out", &out]);
    let o = sscap(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o
}

/// Every file except the timestamped manifest.
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn twice(args: &[&str]) -> Vec<(String, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    let (a, b): (PathBuf, PathBuf) = (dir.path().join("a"), dir.path().join("b"));
    run_in(&a, args);
    run_in(&b, args);
    let (x, y) = (outputs(&a), outputs(&b));
    assert!(!x.is_empty());
    assert_eq!(x, y, "outputs differ for {args:?}");
    x
}

#[test]
fn exponents_smoke() {
    let joint = data("bsc02_uniform_joint.json");
    let files = twice(&["exponents", "--joint", &joint, "--rate", "0.8", "--delta", "0.05", "--n", "12"]);
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["exponents.json", "exponents_beta_curve.csv"]);
    let v: serde_json::Value = serde_json::from_slice(&files[0].1).unwrap();
    let i = v["result"]["mutual_information"].as_f64().unwrap();
    assert!((i - 0.2780719051126377).abs() < 1e-12);
}

#[test]
fn softcover_is_deterministic() {
    let joint = data("bsc02_uniform_joint.json");
    let files = twice(&["softcover", "--joint", &joint, "--rate", "0.8", "--delta", "0.05", "--n", "4:8:2", "--trials", "4", "--split"]);
    let trials = String::from_utf8(files.iter().find(|f| f.0 == "softcover_trials.csv").unwrap().1.clone()).unwrap();
    assert_eq!(trials.lines().count(), 1 + 3 * 4);
    assert!(trials.starts_with("schema_version,n,trial,seed,"));
}

#[test]
fn capacity_is_deterministic() {
    let main = data("bsc01.json");
    twice(&["capacity", "--main", &main, "--alpha", "0.3", "--restarts", "8"]);
    twice(&["capacity", "--main", &main, "--grid", "0:1:0.25", "--restarts", "4"]);
    let eave = data("bsc03.json");
    twice(&["capacity", "--main", &main, "--eave", &eave, "--compare-cardinality", "--restarts", "4"]);
}

#[test]
fn wiretap_is_deterministic() {
    let main = data("bsc01.json");
    let eave = data("bsc03.json");
    twice(&["wiretap", "--main", &main, "--eave", &eave, "--n", "5", "--rate", "0.2", "--rtilde", "0.4"]);
    let files = twice(&[
        "wiretap", "--main", &main, "--alpha", "0.5", "--n", "6", "--rate", "0.17", "--rtilde", "0.34",
        "--mode", "mc:200", "--subsets", "sampled:5", "--expurgate", "--sanov-beta", "0.2",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&files.iter().find(|f| f.0 == "wiretap.json").unwrap().1).unwrap();
    assert_eq!(v["result"]["leakage"]["report"]["sampled"], true);
    assert!(v["result"]["sanov"]["crossover"].as_u64().unwrap() > 1);
}

#[test]
fn rerun_reproduces_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    run_in(&out, &["exponents", "--joint", &data("bsc02_uniform_joint.json"), "--rate", "0.7", "--delta", "0.1"]);
    let manifest = out.join("manifest.json").display().to_string();
    let again = dir.path().join("again").display().to_string();
    let o = sscap(&["rerun", "--manifest", &manifest, "--out", &again]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let text = fs::read_to_string(&manifest).unwrap();
    let mut rec: serde_json::Value = serde_json::from_str(&text).unwrap();
    rec["outputs"][0]["sha256"] = "00".into();
    fs::write(&manifest, serde_json::to_string(&rec).unwrap()).unwrap();
    let o = sscap(&["rerun", "--manifest", &manifest, "--out", &again]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exponents.json"));
}

#[test]
fn missing_input_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = sscap(&["exponents", "--joint", "/nonexistent/joint.json", "--rate", "0.5", "--delta", "0.1", "--seed", "1", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`joint`"));
}

#[test]
fn dry_run_reports_findings_with_exit_codes() {
    let joint = data("bsc02_uniform_joint.json");
    let o = sscap(&["softcover", "--joint", &joint, "--rate", "0.8", "--delta", "0.05", "--n", "30", "--seed", "1", "--dry-run"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("cap\tn\t"));

    let main = data("bsc01.json");
    let o = sscap(&["capacity", "--main", &main, "--alpha", "1.5", "--seed", "1", "--dry-run"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("invalid\talpha"));

    let o = sscap(&["capacity", "--main", &main, "--alpha", "0.5", "--seed", "1", "--dry-run"]);
    assert_eq!(o.status.code(), Some(0));
}
