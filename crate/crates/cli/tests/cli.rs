use std::process::{Command, Output};

use serde_json::Value;

fn oldsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oldsum")).args(args).env_remove("OLDSUM_DIGITS").output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn catalog_list_covers_entries() {
    let o = oldsum(&["catalog", "list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 45);
    assert!(text.lines().any(|l| l.starts_with("knuth ")));
}

#[test]
fn knuth_sweep_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = oldsum(&["catalog", "verify", "--ids", "knuth", "--n", "0..40", "--report", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("total 41 exact 41"));
    let j: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(j["results"].as_array().unwrap().len(), 41);
    assert_eq!(j["summary"]["exact"], 41);
    assert!(j["meta"]["timestamp"].is_u64());
    assert_eq!(j["meta"]["config"]["ids"][0], "knuth");
}

#[test]
fn reports_do_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, name: &str| {
        let path = dir.path().join(name);
        let o = oldsum(&[
            "catalog", "verify", "--ids", "hdj69wz,l5xib79", "--n", "0..6", "--jobs", jobs, "--deterministic", "--report",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("1", "a.json"), run("4", "b.json"));
}

#[test]
fn markdown_and_numeric_mode() {
    let o = oldsum(&[
        "catalog", "verify", "--ids", "hdj69wz", "--n", "0..3", "--v-grid", "0.3,3/4", "--mode", "numeric", "--format",
        "markdown",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let md = String::from_utf8(o.stdout).unwrap();
    assert!(md.contains("## hdj69wz"));
    assert!(md.contains("NumericEqual"));
}

#[test]
fn dsl_file_with_a_false_identity_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ids.sum");
    std::fs::write(
        &path,
        "identity good(n: nat) : sum(k=0..n) C(n,k) == 2^n;\nidentity bad(n: nat) : sum(k=0..n) C(n,k) == 2^n + n\n",
    )
    .unwrap();
    let o = oldsum(&["dsl", "verify", path.to_str().unwrap(), "--n", "0..5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mismatch 5"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(oldsum(&["catalog", "verify", "--ids", "knuth", "--digits", "5"]).status.code(), Some(2));
    assert_eq!(oldsum(&["catalog", "verify", "--ids", "nope"]).status.code(), Some(2));
    assert_eq!(oldsum(&["catalog", "verify", "--ids", "knuth", "--n", "5..1"]).status.code(), Some(2));
    assert_eq!(oldsum(&["transform", "--input", "nope", "--op", "beta01"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_oldsum"))
        .args(["catalog", "verify", "--ids", "knuth", "--n", "0..2"])
        .env("OLDSUM_DIGITS", "500")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transform_emits_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.sum");
    let o = oldsum(&[
        "transform", "--input", "simons", "--op", "cos-parity", "--v", "0", "--verify", "--emit-dsl", path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("identity simons-cos-parity-v0(n: nat)"));
    // the emitted file verifies on its own
    let o = oldsum(&["dsl", "verify", path.to_str().unwrap(), "--n", "0..12"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = oldsum(&["transform", "--input", "waring", "--op", "sin-sub", "--u", "-1/2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8(o.stdout).unwrap().contains("waring-sin-sub-um1_2"));
}

#[test]
fn quadcheck_grid() {
    let o = oldsum(&["quadcheck", "--kinds", "I,beta01", "--grid", "u=0..4,v=0..4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("checked 50 failed 0"), "{}", stderr(&o));
    let o = oldsum(&["quadcheck", "--kinds", "K", "--grid", "u=-1/2..1:1/2,v=0..1", "--digits", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn golden_vectors_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vectors.json");
    let o = oldsum(&["emit-vectors", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let j: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let knuth = j["entries"].as_array().unwrap().iter().find(|e| e["id"] == "knuth").unwrap();
    let lhs: Vec<&str> = knuth["vectors"].as_array().unwrap()[..5].iter().map(|v| v["lhs"].as_str().unwrap()).collect();
    assert_eq!(lhs, ["1", "0", "1/2", "0", "3/8"]);
}
