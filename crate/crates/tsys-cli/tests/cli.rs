use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tsys::{Boundary, MutationDirection};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_tsys")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn tsys")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tsys-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Scripted staircase + three mutations reproduces the library-built
/// boundary file byte-for-byte.
#[test]
fn scripted_mutations_reproduce_fixture_file() {
    let f = tmp("fixture.json");
    let st = run(&["staircase", "--rank", "3", "--width", "6", "-o", path(&f)]);
    assert!(st.status.success(), "{:?}", st);
    for (a, j) in [(2, 2), (1, 3), (2, 6)] {
        let m = run(&[
            "mutate", "--boundary", path(&f), "--at", &format!("{},{}", a, j), "--dir", "fwd",
            "-o", path(&f),
        ]);
        assert!(m.status.success(), "{:?}", m);
        assert!(!stdout(&m).trim().is_empty(), "mutate prints the new label");
    }
    let mut want = Boundary::basic_staircase(3, 0, 6);
    for (a, j) in [(2, 2), (1, 3), (2, 6)] {
        want = want.mutate(a, j, MutationDirection::Forward).unwrap().0;
    }
    assert_eq!(std::fs::read_to_string(&f).unwrap(), want.to_file_string());
}

#[test]
fn forward_then_backward_restores_file() {
    let f = tmp("roundtrip.json");
    let g = tmp("roundtrip-mut.json");
    assert!(run(&["staircase", "--rank", "2", "--width", "6", "-o", path(&f)]).status.success());
    let before = std::fs::read_to_string(&f).unwrap();
    assert!(run(&["mutate", "--boundary", path(&f), "--at", "1,3", "--dir", "fwd", "-o", path(&g)])
        .status
        .success());
    assert!(run(&["mutate", "--boundary", path(&g), "--at", "1,3", "--dir", "bwd", "-o", path(&g)])
        .status
        .success());
    assert_eq!(std::fs::read_to_string(&g).unwrap(), before);
}

#[test]
fn solve_methods_print_identical_text() {
    let f = tmp("solve.json");
    assert!(run(&["staircase", "--rank", "2", "--width", "8", "-o", path(&f)]).status.success());
    let args = |m: &str| {
        vec![
            "solve".to_string(),
            "--boundary".to_string(),
            path(&f).to_string(),
            "--point".to_string(),
            "2,4,2".to_string(),
            "--method".to_string(),
            m.to_string(),
        ]
    };
    let outputs: Vec<String> = ["network", "recursion", "determinant", "lgv"]
        .iter()
        .map(|m| {
            let o = Command::new(bin()).args(args(m)).output().unwrap();
            assert!(o.status.success(), "method {}: {:?}", m, o);
            stdout(&o)
        })
        .collect();
    assert!(!outputs[0].trim().is_empty());
    assert!(outputs.iter().all(|o| *o == outputs[0]));
}

#[test]
fn domain_and_input_exit_codes() {
    let f = tmp("codes.json");
    assert!(run(&["staircase", "--rank", "2", "--width", "6", "-o", path(&f)]).status.success());
    let m = tmp("codes-mut.json");
    assert!(run(&["mutate", "--boundary", path(&f), "--at", "1,3", "--dir", "fwd", "-o", path(&m)])
        .status
        .success());
    // Below the raised boundary vertex.
    let below = run(&["solve", "--boundary", path(&m), "--point", "1,3,1"]);
    assert_eq!(below.status.code(), Some(3), "{:?}", below);
    // Mutation at a non-extremal vertex.
    let flat = run(&["mutate", "--boundary", path(&m), "--at", "1,4", "--dir", "fwd", "-o", path(&m)]);
    assert_eq!(flat.status.code(), Some(3), "{:?}", flat);
    // Unreadable file and malformed point.
    let miss = run(&["solve", "--boundary", "/nonexistent.json", "--point", "1,1,2"]);
    assert_eq!(miss.status.code(), Some(2));
    let bad = run(&["solve", "--boundary", path(&f), "--point", "1,1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_staircase_passes() {
    let f = tmp("verify.json");
    assert!(run(&["staircase", "--rank", "3", "--width", "6", "-o", path(&f)]).status.success());
    let v = run(&["verify", "--boundary", path(&f), "--kmax", "4"]);
    assert!(v.status.success(), "{:?}", v);
    assert!(stdout(&v).contains("all checks passed"));
}

#[test]
fn qsys_check_passes() {
    let q = run(&["qsys", "--motzkin", "2,1,0", "--alpha", "1", "--n", "3", "--check"]);
    assert!(q.status.success(), "{:?}", q);
    assert!(stdout(&q).starts_with("R[1,3]"));
}

#[test]
fn network_exports_are_deterministic_and_json_parses() {
    let f = tmp("net.json");
    assert!(run(&["staircase", "--rank", "3", "--width", "6", "-o", path(&f)]).status.success());
    for (a, j) in [(2, 2), (1, 3), (2, 6)] {
        assert!(run(&[
            "mutate", "--boundary", path(&f), "--at", &format!("{},{}", a, j), "--dir", "fwd",
            "-o", path(&f),
        ])
        .status
        .success());
    }
    let dot1 = run(&["network", "--boundary", path(&f), "--range", "0", "6", "--format", "dot"]);
    let dot2 = run(&["network", "--boundary", path(&f), "--range", "0", "6", "--format", "dot"]);
    assert!(dot1.status.success());
    assert_eq!(stdout(&dot1), stdout(&dot2));
    assert!(stdout(&dot1).starts_with("digraph"));
    let js = run(&["network", "--boundary", path(&f), "--range", "0", "6", "--format", "json"]);
    assert!(js.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&js)).unwrap();
    assert!(parsed["edges"].as_array().map(|a| !a.is_empty()).unwrap_or(false));
}
