use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn spec_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cgl-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn sol() -> PathBuf {
    spec_file("sol.json", r#"{"k": 2, "phi": [[2,1],[1,1]], "generators": "default"}"#)
}

fn heis() -> PathBuf {
    spec_file("heis.json", r#"{"k": 2, "phi": [[1,1],[0,1]], "generators": "default"}"#)
}

fn cgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn cgrowth_csv() {
    let s = sol();
    let o = cgl(&["cgrowth", "--spec", s.to_str().unwrap(), "--radius", "8", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,ball_size,conj_classes");
    assert_eq!(lines[1], "0,1,1");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[9], "8,7277,267");
}

#[test]
fn pairwise_matches_keys() {
    let s = sol();
    let a = cgl(&["cgrowth", "--spec", s.to_str().unwrap(), "--radius", "4", "--format", "csv"]);
    let b = cgl(&["cgrowth", "--spec", s.to_str().unwrap(), "--radius", "4", "--format", "csv", "--pairwise"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn conjugate_example() {
    let s = sol();
    let o = cgl(&[
        "conjugate",
        "--spec",
        s.to_str().unwrap(),
        "--g",
        r#"{"v":[1,0],"s":0}"#,
        "--h",
        r#"{"v":[2,1],"s":0}"#,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o), serde_json::json!({"conjugate": true, "witness": {"v": [0, 0], "s": 1}}));

    let o = cgl(&[
        "conjugate",
        "--spec",
        s.to_str().unwrap(),
        "--g",
        r#"{"v":[1,0],"s":0}"#,
        "--h",
        r#"{"v":[2,0],"s":0}"#,
    ]);
    assert_eq!(json(&o), serde_json::json!({"conjugate": false, "witness": null}));
}

#[test]
fn witness_example() {
    let s = sol();
    let o = cgl(&["witness", "--spec", s.to_str().unwrap(), "--n", "6", "--verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["m"], 4);
    assert_eq!(v["verification"]["verified"], true);
}

#[test]
fn dirichlet_example() {
    let o = cgl(&["dirichlet", "--coords", "1.6180339887", "--m", "10"]);
    let v = json(&o);
    assert_eq!((v["q"].as_u64(), v["p"][0].as_i64()), (Some(5), Some(8)));
    let b = cgl(&["dirichlet", "--coords", "1.6180339887", "--m", "10", "--brute"]);
    assert_eq!(stdout(&o), stdout(&b));
}

#[test]
fn validate_and_classify() {
    let h = heis();
    let v = json(&cgl(&["validate", "--spec", h.to_str().unwrap()]));
    assert_eq!(v["quasi_unipotent"], true);
    let o = cgl(&["classify", "--spec", h.to_str().unwrap(), "--radius", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["agreement"], true);
}

#[test]
fn lemma1_runs() {
    let s = sol();
    let o = cgl(&["lemma1", "--spec", s.to_str().unwrap(), "--e", "2", "--radius", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["index"], 2);
    assert_eq!(v["holds"], true);
}

#[test]
fn distortion_runs() {
    let s = sol();
    let o = cgl(&["distortion", "--spec", s.to_str().unwrap(), "--nmax", "64", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["bound_holds"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(cgl(&["nonsense"]).status.code(), Some(1));
    assert_eq!(cgl(&["ball", "--spec", "/nonexistent.json", "--radius", "2"]).status.code(), Some(1));
    let bad = spec_file("bad.json", r#"{"k": 2, "phi": [[2,0],[0,1]], "generators": "default"}"#);
    assert_eq!(cgl(&["validate", "--spec", bad.to_str().unwrap()]).status.code(), Some(1));

    // partial table on stdout, exit 2
    let s = sol();
    let o = cgl(&["ball", "--spec", s.to_str().unwrap(), "--radius", "30", "--max-mem", "100000", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("n,ball_size,new_elements\n0,1,1\n"));
    assert!(!o.stderr.is_empty());
}

#[test]
fn output_is_thread_independent() {
    let s = sol();
    let run = |t: &str| stdout(&cgl(&["cgrowth", "--spec", s.to_str().unwrap(), "--radius", "9", "--threads", t]));
    let one = run("1");
    assert_eq!(one, run("4"));
    let w = |t: &str| stdout(&cgl(&["witness", "--spec", s.to_str().unwrap(), "--n", "12", "--threads", t]));
    assert_eq!(w("1"), w("3"));
}
