use std::process::{Command, Output};

use maclane::maclane_chain::Chain;
use maclane::om_factorizer::TreeReport;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maclane")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn factor_ramified_quadratic() {
    let o = run(&["factor", "-p", "2", "x^2+1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let leaves = v["leaves"].as_array().unwrap();
    assert_eq!(leaves.len(), 1);
    assert_eq!((leaves[0]["e"].as_u64(), leaves[0]["f"].as_u64()), (Some(2), Some(1)));
    assert_eq!(v["certified"], Value::Bool(true));
}

#[test]
fn factor_report_reemits() {
    for (f, p) in [("x^4-4", "2"), ("x^3-10", "3"), ("x^6+x^3+1", "3")] {
        let o = run(&["factor", "-p", p, f]);
        let out = stdout(&o);
        let back: TreeReport = serde_json::from_str(&out).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap() + "\n", out);
    }
}

#[test]
fn non_squarefree_is_a_math_error() {
    let o = run(&["factor", "-p", "2", "x^2"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["error"], "input not squarefree");
    assert_eq!(v["kind"], "not_squarefree");
}

#[test]
fn usage_errors() {
    for args in [
        &["factor", "x^2+1"][..],
        &["factor", "-p", "4", "x^2+1"],
        &["factor", "-p", "2", "x^^2"],
        &["frobnicate"],
        &["newton", "-p", "2", "--chain", "/nonexistent/chain.json", "x"],
        &["factor", "-p", "2", "x+1", "--format", "yaml"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn newton_at_gauss() {
    let o = run(&["newton", "-p", "2", "--chain", "gauss", "x^2+1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"vertices\":[[0,[\"0\"]],[2,[\"0\"]]]}\n");
    let o = run(&["newton", "-p", "2", "--format", "text", "x^4-4"]);
    let text = stdout(&o);
    assert!(text.contains("  2 | *"));
    assert!(text.contains("  0 |                 *"));
    assert!(text.contains("3/2 |     \\"));
}

#[test]
fn residual_output() {
    let o = run(&["residual", "-p", "2", "x^2+x+1"]);
    assert_eq!(stdout(&o), "{\"s\":0,\"sprime\":2,\"u\":[\"0\"],\"R\":\"y^2+y+1\"}\n");
}

#[test]
fn chain_round_trip() {
    let dir = std::env::temp_dir().join(format!("maclane-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chain.json");
    let o = run(&["chain", "-p", "3", "x^2+1", "--gamma", "2/3"]);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout(&o);
    std::fs::write(&path, &first).unwrap();
    let p = path.to_str().unwrap();
    let again = stdout(&run(&["chain", "--chain", p]));
    assert_eq!(again, first);
    assert_eq!(Chain::from_json(first.trim()).unwrap().to_json() + "\n", first);

    // Residual over the loaded chain sees the degree-two residue field.
    let o = run(&["residual", "--chain", p, "x^2+1"]);
    assert_eq!(json(&o)["s"], 1);

    let o = run(&["chain", "--chain", p, "-p", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["chain", "--chain", p, "x^3+x+1", "--gamma", "5"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn deterministic_output() {
    let a = run(&["factor", "-p", "3", "--seed", "7", "x^4+1"]);
    let b = run(&["factor", "-p", "3", "--seed", "7", "x^4+1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["ok"], Value::Bool(true));
}
