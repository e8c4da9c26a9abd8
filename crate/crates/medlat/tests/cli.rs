use std::process::Command;

use medlat::records::parse_csv;

fn medlat(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_medlat")).args(args).output().unwrap()
}

#[test]
fn writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    let out = medlat(&[
        "--function", "f1", "--budgets", "14,15,16", "--runs", "2",
        "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slope vs M"));
    let parsed = parse_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(parsed.records.len(), 6);
    assert_eq!(parsed.get("alpha"), Some("1.5000000000000000e0"));
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(plot.matches("<circle").count(), 6);
}

#[test]
fn stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let args = ["--function", "f2", "--budgets", "14,15", "--seed", "3"];
    let a = medlat(&[&args[..], &["--out", csv.to_str().unwrap(), "--threads", "1"]].concat());
    let b = medlat(&[&args[..], &["--threads", "8"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_eq!(std::fs::read(&csv).unwrap(), b.stdout);
}

#[test]
fn nstar_table_mode() {
    let out = medlat(&["--fig", "3", "--budgets", "10,20,30"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn bad_flags_fail() {
    assert!(!medlat(&["--function", "nope"]).status.success());
    assert!(!medlat(&["--gamma", "poly:-1"]).status.success());
    assert!(!medlat(&["--fig", "5"]).status.success());
}
