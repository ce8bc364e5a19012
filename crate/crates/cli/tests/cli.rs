use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../core/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn torsor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsor"))
        .args(args)
        .env_remove("TORSOR_BUDGET_SECONDS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn matroid_queries() {
    let m = fixture("fig1.matrix");
    let out = torsor(&["bases", &m]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 5);

    let out = torsor(&["group", &m]);
    assert!(stdout(&out).starts_with("invariant_factors: [5]\n"));
    assert_eq!(json(&torsor(&["--format", "json", "group", &m]))["order"], 5);

    let out = torsor(&["circuits", "--signed", &m]);
    assert_eq!(stdout(&out).lines().count(), 6);
    let graph = torsor(&["circuits", "--signed", &fixture("fig1.graph")]);
    assert_eq!(stdout(&graph), stdout(&out));
}

#[test]
fn signature_commands() {
    let m = fixture("fig1.matrix");
    let sig = fixture("fig1.sig");
    let out = torsor(&["signature", "check", "--kind", "triangulating", &m, &sig]);
    assert_eq!(stdout(&out).lines().next(), Some("true"));
    let out = torsor(&["--format", "json", "signature", "check", "--kind", "acyclic", &m, &sig]);
    assert_eq!(json(&out)["verdict"], true);

    let planar = torsor(&["signature", "from-planar", &fixture("fig1.embedding.json")]);
    assert_eq!(stdout(&planar), std::fs::read_to_string(&sig).unwrap());

    let a = torsor(&["signature", "enumerate", "--filter", "acyclic", &m]);
    let b = torsor(&["signature", "enumerate", "--filter", "acyclic", &m]);
    assert_eq!(a.stdout, b.stdout);
    let all = torsor(&["signature", "enumerate", &m]);
    assert_eq!(stdout(&all).lines().count(), 8);
    assert!(stdout(&a).lines().count() < 8);
}

#[test]
fn bby_and_act() {
    let m = fixture("fig1.matrix");
    let sig = fixture("fig1.sig");
    let map = stdout(&torsor(&["bby", "map", &m, &sig]));
    assert_eq!(map.lines().count(), 5);
    assert!(map.contains("f1,f3 → -,-,+,+\n"));
    assert!(map.contains("f2,f3 → +,-,+,+\n"));

    let out = torsor(&["act", "--arc", "+f1", "--basis", "f1,f3", &m, &sig]);
    assert_eq!(stdout(&out).lines().next(), Some("f2,f3"));
    let out = torsor(&["act", "--arc", "+f3", "--basis", "f1,f3", &m, &sig]);
    assert!(stdout(&out).contains("end: +,-,-,+\n"));
    let out = torsor(&["act", "--arc", "+f9", "--basis", "f1,f3", &m, &sig]);
    assert_eq!(out.status.code(), Some(2));
    let out = torsor(&["act", "--arc", "+f1", "--basis", "f3,f4", &m, &sig]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verification_reports() {
    let m = fixture("fig1.matrix");
    let sig = fixture("fig1.sig");
    let out = torsor(&["--format", "json", "verify", "all", &m, &sig]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["status"], "ok");
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
    assert!(report["matroid_hash"].as_str().unwrap().len() == 64);
    let again = torsor(&["--format", "json", "verify", "all", &m, &sig]);
    assert_eq!(out.stdout, again.stdout);

    let single = torsor(&[
        "--format",
        "json",
        "verify",
        "consistency",
        "--arc",
        "+f1",
        "--basis",
        "f1,f3",
        "--element",
        "f4",
        &m,
        &sig,
    ]);
    let report = json(&single);
    assert_eq!(report["status"], "ok");
    assert_eq!(report["triples_checked"], 1);
    assert_eq!(report["consistency"]["checks"]["deletion"], 1);

    let planar = torsor(&["verify", "all", &fixture("fig1.embedding.json")]);
    assert_eq!(planar.status.code(), Some(0));
    assert!(stdout(&planar).starts_with("status: ok\n"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_matrix = dir.path().join("bad.matrix");
    std::fs::write(&bad_matrix, "2 2\n1 0\n0 x\n").unwrap();
    let out = torsor(&["bases", bad_matrix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let bad_sig = dir.path().join("bad.sig");
    std::fs::write(&bad_sig, "[circuits]\n{f1,f2}: +f1-f2\n").unwrap();
    let out = torsor(&["bby", "map", &fixture("fig1.matrix"), bad_sig.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = torsor(&["bases", dir.path().join("missing.matrix").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = torsor(&["verify", "everything", &fixture("fig1.matrix")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budgets_exit_with_three() {
    let m = fixture("fig1.matrix");
    let sig = fixture("fig1.sig");
    let out = torsor(&["--max-orientations", "8", "bby", "map", &m, &sig]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_torsor"))
        .args(["sweep", "--max-edges", "5"])
        .env("TORSOR_BUDGET_SECONDS", "0.000001")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn small_sweep() {
    let out = torsor(&["--format", "json", "sweep", "--max-edges", "3", "--no-r10"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["status"], "ok");
    assert_eq!(report["matroids"].as_array().unwrap().len(), 17);
    assert!(report["triples_checked"].as_u64().unwrap() > 0);
}
