//! End-to-end checks of the installed binary: output shapes, exit codes,
//! and determinism of generated artifacts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_switchmax"))
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/example1.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_prints_value_sequence_state() {
    let out = run(&["solve", fixture().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value: 10946"), "{text}");
    assert!(text.contains("sequence: 0 0 0 0 0 0 0 0"), "{text}");
    assert!(text.contains("xK: 89 55"), "{text}");
}

#[test]
fn solve_objective_override() {
    let out = run(&["solve", fixture().to_str().unwrap(), "--objective", "l1"]);
    assert!(out.status.success());
    // l1 optimum of the same instance: 89 + 55
    assert!(stdout(&out).contains("value: 144"));
}

#[test]
fn brute_force_agrees_with_solve() {
    let out = run(&["brute-force", fixture().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value: 10946"), "{text}");
    assert!(text.contains("reachable: 256"), "{text}");
}

#[test]
fn trace_nk_csv_shape() {
    let out = run(&["trace-nk", fixture().to_str().unwrap(), "--K", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,N_k"));
    assert_eq!(lines.next(), Some("0,1"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn classify_emits_counts_row() {
    let out = run(&["classify", fixture().to_str().unwrap(), "--k", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("k,e0,e1,e2,e3,e4\n5,"), "{text}");
}

#[test]
fn gen_random_is_deterministic() {
    let args = ["gen-random", "--n", "2", "--m", "2", "--K", "20", "--seed", "42"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    assert!(a.contains("\"K\": 20") || a.contains("\"K\":20"), "{a}");
    let c = stdout(&run(&["gen-random", "--n", "2", "--m", "2", "--K", "20", "--seed", "43"]));
    assert_ne!(a, c);
}

#[test]
fn gen_sat_pipeline() {
    let dir = std::env::temp_dir().join("switchmax-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cnf = dir.join("one.cnf");
    std::fs::write(&cnf, "p cnf 3 1\n1 2 3 0\n").unwrap();
    let inst = dir.join("one.json");
    let out = run(&["gen-sat", cnf.to_str().unwrap(), "--out", inst.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold: 1"));
    let solved = run(&["solve", inst.to_str().unwrap()]);
    assert!(solved.status.success());
    assert!(stdout(&solved).contains("value: 1"));
}

#[test]
fn check_mortal_and_jsr() {
    let dir = std::env::temp_dir().join("switchmax-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let nil = dir.join("nilpotent.json");
    std::fs::write(
        &nil,
        r#"{"n":2,"m":1,"K":2,"arithmetic":"exact","matrices":[[[0,1],[0,0]]],"a":[1,1],"objective":{"kind":"l1"}}"#,
    )
    .unwrap();
    let out = run(&["check-mortal", nil.to_str().unwrap(), "--k", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("mortal: true"));

    let dil = dir.join("dilation.json");
    std::fs::write(
        &dil,
        r#"{"n":2,"m":1,"K":3,"arithmetic":"float","matrices":[[[2,0],[0,2]]],"a":[1,0],"objective":{"kind":"l2sq"}}"#,
    )
    .unwrap();
    let out = run(&["jsr-bound", dil.to_str().unwrap(), "--k", "3", "--p", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let v: f64 = text.trim().strip_prefix("jsr_lower_bound: ").unwrap().parse().unwrap();
    assert!((v - 2.0).abs() < 1e-9, "{text}");
}

#[test]
fn export_minlp_writes_pair() {
    let dir = std::env::temp_dir().join("switchmax-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let prefix = dir.join("example1");
    let out = run(&[
        "export-minlp",
        fixture().to_str().unwrap(),
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let model = std::fs::read_to_string(prefix.with_extension("mod")).unwrap();
    let data = std::fs::read_to_string(prefix.with_extension("dat")).unwrap();
    // 2 states x 8 steps dynamics, 8 assignment rows, 16 binaries
    assert_eq!(model.matches("s.t. dyn_").count(), 16);
    assert_eq!(model.matches("s.t. assign_").count(), 8);
    assert!(model.contains("var z{1..8, 1..2} binary;"));
    assert!(data.contains("param K := 8;"));
}

#[test]
fn bench_csv_and_empty_grid() {
    let out = run(&["bench", "2,2,10,2", "--seed", "7", "--limit-secs", "60"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.contains("solved")), "{text}");

    let empty = run(&["bench", ""]);
    assert!(empty.status.success());
    assert_eq!(stdout(&empty).lines().count(), 1);
}

#[test]
fn exit_codes() {
    // usage error
    let out = run(&["solve", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    // runtime diagnostics
    let out = run(&["solve", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed instance
    let dir = std::env::temp_dir().join("switchmax-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"n":2,"m":1,"K":-1}"#).unwrap();
    let out = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // help exits 0
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
