use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn slopekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slopekit")).args(args).output().expect("run slopekit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn emit(dir: &Path, name: &str, file: &str) -> String {
    let path = dir.join(file);
    let p = path.to_str().unwrap().to_owned();
    let o = slopekit(&["fixtures", "--emit", &p, "--name", name]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn fixtures_then_analyze() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "paper-example", "paper_example.slopes");
    let o = slopekit(&["analyze", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cardinality 12, diameter 8"), "{}", stdout(&o));
}

#[test]
fn search_reports_ten() {
    let o = slopekit(&["search", "--diameter", "8", "--center-k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("max cardinality 10"), "{text}");
    assert!(text.contains("1/0"), "{text}");
}

#[test]
fn search_emits_witness_and_certificate() {
    let dir = TempDir::new().unwrap();
    let base = dir.path().join("w.slopes");
    let o = slopekit(&["search", "--diameter", "4", "--center-k", "1", "--emit", base.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let names: Vec<String> =
        fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().any(|n| n.ends_with(".certificate.txt")), "{names:?}");
    let witness = names.iter().find(|n| n.ends_with(".slopes")).expect("witness file");
    let a = slopekit(&["analyze", dir.path().join(witness).to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = emit(dir.path(), "integer-witness", "ints.slopes");
    let o = slopekit(&["verify", &good]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("10"));

    let bad = dir.path().join("far.slopes");
    fs::write(&bad, "1/0\n1/2\n9/2\n17/2\n").unwrap();
    assert_eq!(slopekit(&["verify", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn cusp_report() {
    let dir = TempDir::new().unwrap();
    let p = emit(dir.path(), "square3", "square3.cusp");
    let o = slopekit(&["cusp", &p, "--report"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("proposition holds"), "{}", stdout(&o));
}

#[test]
fn malformed_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.slopes");
    fs::write(&p, "1/0\nfoo\n").unwrap();
    let o = slopekit(&["analyze", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    fs::write(&p, "1/0\n2/4\n1/2\n").unwrap();
    assert_eq!(slopekit(&["analyze", p.to_str().unwrap()]).status.code(), Some(2));

    let c = dir.path().join("bad.cusp");
    fs::write(&c, "meridian 1 0\nlongitude 2 0\n").unwrap();
    assert_eq!(slopekit(&["cusp", c.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(slopekit(&["analyze", "/nonexistent/x.slopes"]).status.code(), Some(2));
    assert_eq!(slopekit(&["search"]).status.code(), Some(2));
    assert_eq!(slopekit(&["search", "--diameter", "20"]).status.code(), Some(2));
}

#[test]
fn cross_check_passes() {
    let o = slopekit(&["cross-check", "--diameter", "8", "--center-k", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
