//! End-to-end tests of the gridups binary: command surfaces, file formats,
//! exit codes, and output determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gridups() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gridups"));
    cmd.env_remove("GRIDUPS_GUARD");
    cmd.env_remove("GRIDUPS_TRUNCATION");
    cmd
}

fn run(args: &[&str]) -> Output {
    gridups().args(args).output().expect("binary runs")
}

fn write_grid(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn validate_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_grid(dir.path(), "u2.json", r#"{"n":2,"X":[0,1],"O":[1,0]}"#);
    let out = run(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "valid, n=2, components=1\n");
}

#[test]
fn validate_accepts_compact_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_grid(dir.path(), "u3.txt", "3;X:0,1,2;O:2,0,1\n");
    let out = run(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "valid, n=3, components=1\n");
}

#[test]
fn validate_collision_exits_one_with_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_grid(dir.path(), "bad.json", r#"{"n":2,"X":[0,1],"O":[0,1]}"#);
    let out = run(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("X and O share square in column 0"));
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["validate", "/nonexistent/grid.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn preset_writes_canonical_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("trefoil.json");
    let out = run(&["preset", "torus:2,3", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let content = fs::read_to_string(&out_path).unwrap();
    assert!(content.starts_with(r#"{"n":5,"X":["#));
    let check = run(&["validate", out_path.to_str().unwrap()]);
    assert_eq!(stdout(&check), "valid, n=5, components=1\n");

    let out = run(&["preset", "unknot:2"]);
    assert_eq!(stdout(&out), "{\"n\":2,\"X\":[0,1],\"O\":[1,0]}\n");

    let bad = run(&["preset", "torus:2,4"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn upsilon_single_t_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trefoil.json");
    run(&["preset", "torus:2,3", "--out", path.to_str().unwrap()]);
    let out = run(&["upsilon", path.to_str().unwrap(), "--t", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "t,upsilon\n1/2,-1/2\n");
}

#[test]
fn upsilon_profile_of_unknot_is_all_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_grid(dir.path(), "u2.json", r#"{"n":2,"X":[0,1],"O":[1,0]}"#);
    let out = run(&["upsilon", &path, "--samples", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[0], "t,upsilon");
    for line in &lines[1..] {
        assert!(line.ends_with(",0"), "unexpected row {line}");
    }
}

#[test]
fn upsilon_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trefoil.json");
    run(&["preset", "torus:2,3", "--out", path.to_str().unwrap()]);
    let out = run(&[
        "upsilon",
        path.to_str().unwrap(),
        "--t",
        "1/2",
        "--t",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(
        stdout(&out),
        r#"[{"t":"1/2","upsilon":"-1/2"},{"t":"1","upsilon":"-1"}]"#.to_owned() + "\n"
    );
}

#[test]
fn guard_refusal_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u12.json");
    run(&["preset", "unknot:12", "--out", path.to_str().unwrap()]);
    let out = run(&["upsilon", path.to_str().unwrap(), "--t", "1/2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("guard"));

    // the guard is configurable through the environment
    let small = gridups()
        .args(["upsilon", path.to_str().unwrap(), "--t", "1/2"])
        .env("GRIDUPS_GUARD", "10")
        .output()
        .unwrap();
    assert_eq!(small.status.code(), Some(3));
}

#[test]
fn homology_report_for_trefoil() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trefoil.json");
    run(&["preset", "torus:2,3", "--out", path.to_str().unwrap()]);
    let out = run(&["homology", path.to_str().unwrap(), "--t", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["t"], "1/2");
    assert_eq!(report["rank"], 16);
    assert_eq!(report["free"].as_array().unwrap().len(), 16);
}

#[test]
fn audit_passes_and_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_grid(dir.path(), "u2.json", r#"{"n":2,"X":[0,1],"O":[1,0]}"#);
    let args = [
        "audit", &path, "--moves", "6", "--seed", "7", "--max-n", "5", "--t", "1/2",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let report: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["steps"].as_array().unwrap().len(), 7);
}

#[test]
fn truncation_override_by_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trefoil.json");
    run(&["preset", "torus:2,3", "--out", path.to_str().unwrap()]);
    let auto = run(&["homology", path.to_str().unwrap(), "--t", "1/2"]);
    let flagged = run(&[
        "homology", path.to_str().unwrap(), "--t", "1/2", "--truncation", "64",
    ]);
    let via_env = gridups()
        .args(["homology", path.to_str().unwrap(), "--t", "1/2"])
        .env("GRIDUPS_TRUNCATION", "64")
        .output()
        .unwrap();
    let parse = |o: &Output| -> serde_json::Value { serde_json::from_str(&stdout(o)).unwrap() };
    let (a, f, e) = (parse(&auto), parse(&flagged), parse(&via_env));
    assert_eq!(f["truncation"], 64);
    assert_eq!(e["truncation"], 64);
    assert_eq!(a["free"], f["free"]);
    assert_eq!(a["torsion"], f["torsion"]);
    assert_eq!(f, e);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path(), "u2.json", r#"{"n":2,"X":[0,1],"O":[1,0]}"#);
    let dest = dir.path().join("report.csv");
    let out = run(&["upsilon", &grid, "--t", "1/2", "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&dest).unwrap(), "t,upsilon\n1/2,0\n");
}
