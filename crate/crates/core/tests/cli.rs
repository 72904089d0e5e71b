//! End-to-end runs of the `cayley` binary: outputs, exit codes, config
//! precedence and bundle round-trips.

use std::fs;
use std::process::{Command, Output};

fn cayley(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cayley")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn dehn_bound_table_entry() {
    let o = cayley(&["bounds", "dehn", "--class", "poly:3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "poly:1/3");
}

#[test]
fn unary_deviation_column_is_zero() {
    let o = cayley(&["measure", "h", "--rep", "unary-z", "--n", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n,h_lower,h_upper"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 13);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!((cols[1], cols[2]), ("0", "0"), "{row}");
    }
}

#[test]
fn exit_codes_and_error_lines() {
    let cap = cayley(&["measure", "h", "--rep", "unary-z", "--n", "12", "--cap-words", "3"]);
    assert_eq!(cap.status.code(), Some(3));
    assert!(stderr(&cap).lines().last().unwrap().starts_with("ERROR: cap exceeded"));

    for args in [
        vec!["bogus"],
        vec!["bounds", "dehn", "--class", "nonsense"],
        vec!["measure", "h", "--rep", "no-such-rep", "--n", "3"],
        vec!["measure", "h", "--rep", "binary-z", "--n", "3"],
        vec!["measure", "h", "--rep", "unary-z", "--n", "3", "--cap-ball", "0"],
    ] {
        let o = cayley(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).lines().any(|l| l.starts_with("ERROR: ")), "{args:?}");
    }

    let io = cayley(&["--config", "/nonexistent/cayley.json", "measure", "h"]);
    assert_eq!(io.status.code(), Some(1));
    assert_eq!(cayley(&["--help"]).status.code(), Some(0));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"rep": "unary-z", "n": 5}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&cayley(&["--config", cfg, "measure", "h"]));
    assert_eq!(from_file.lines().count(), 7);
    let overridden = stdout(&cayley(&["--config", cfg, "measure", "h", "--n", "2"]));
    assert_eq!(overridden.lines().count(), 4);

    fs::write(dir.path().join("bad.json"), r#"{"radius": 3}"#).unwrap();
    let bad = cayley(&["--config", dir.path().join("bad.json").to_str().unwrap(), "measure", "h"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn output_does_not_depend_on_workers_or_repetition() {
    let run = |workers: &str| cayley(&["measure", "h", "--rep", "lamplighter-s", "--n", "6", "--workers", workers]).stdout;
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("1"));
    assert_eq!(one, run("4"));
}

#[test]
fn bundles_round_trip_and_tampering_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("zz");
    let bundle_arg = bundle.to_str().unwrap();
    assert_eq!(cayley(&["rep", "build", "--rep", "z-times-z", "--out", bundle_arg]).status.code(), Some(0));

    let ok = cayley(&["rep", "verify", "--rep", bundle_arg, "--k", "5"]);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["passed"], true);

    // swap the two generators' multipliers
    let (x, y) = (bundle.join("mult_x.json"), bundle.join("mult_x'.json"));
    let (a, b) = (fs::read(&x).unwrap(), fs::read(&y).unwrap());
    fs::write(&x, b).unwrap();
    fs::write(&y, a).unwrap();
    let bad = cayley(&["rep", "verify", "--rep", bundle_arg, "--k", "5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("ERROR: verification failed"));
}

#[test]
fn first_order_queries() {
    let sentence = cayley(&["fo", "eval", "--heisenberg", "--formula", "exists x,y R0(x,y)"]);
    assert_eq!(sentence.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&sentence.stdout).unwrap();
    assert_eq!((v["sentence"].as_bool(), v["holds"].as_bool()), (Some(true), Some(true)));

    let rel = cayley(&["fo", "eval", "--heisenberg", "--formula", "R0(x,y)"]);
    let v: serde_json::Value = serde_json::from_slice(&rel.stdout).unwrap();
    assert_eq!(v["vars"], serde_json::json!(["x", "y"]));
    assert!(v["automaton"]["alphabet"].is_array());

    let unbound = cayley(&["fo", "eval", "--heisenberg", "--formula", "Q(x)"]);
    assert_eq!(unbound.status.code(), Some(2));
}

#[test]
fn ball_export_lists_distances() {
    let o = cayley(&["ball", "export", "--rep", "unary-z", "--n", "2"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("key,distance"));
    let distances: Vec<u32> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(distances, [0, 1, 1, 2, 2]);
}
