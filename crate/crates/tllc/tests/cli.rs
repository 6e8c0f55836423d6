use std::process::{Command, Output};

fn tllc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tllc")).args(args).env_remove("TLLC_CONFIG").output().expect("spawn tllc")
}

#[test]
fn rejects_p_two() {
    assert_eq!(tllc(&["run", "--p", "2", "--suite", "weil"]).status.code(), Some(2));
}

#[test]
fn rejects_unknown_suite() {
    assert_eq!(tllc(&["run", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn passing_run_is_reproducible() {
    let args = ["run", "--suite", "hilbert,weil", "--seed", "11", "--format", "csv"];
    let (a, b) = (tllc(&args), tllc(&args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn list_suites_names_every_suite() {
    let out = String::from_utf8(tllc(&["list-suites"]).stdout).unwrap();
    for s in ["weil", "hilbert", "covers", "separation", "dl"] {
        assert!(out.lines().any(|l| l.starts_with(s)), "{s} missing");
    }
}

#[test]
fn compute_hilbert_prints_json() {
    let out = tllc(&["compute", "hilbert", "--p", "3", "3", "-1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object());
}
