use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwquasi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    let s = String::from_utf8_lossy(&o.stdout);
    serde_json::from_str(s.lines().next().expect("one record")).expect("json")
}

#[test]
fn invariant_one_point() {
    let o = run(&["invariant", "--N", "1", "--g", "0", "--ins", "2:pt"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["value"]["scalar"], "1/4");
    assert_eq!(v["degree"], 2);
    assert_eq!(v["key"], "gw[N=1;g=0;ins=(2,1)]");
}

#[test]
fn invariant_atom_record() {
    let o = run(&["invariant", "--N", "1", "--g", "1", "--ins", "0:1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["atoms"], true);
    assert_eq!(v["value"]["atoms"]["gw[N=1;g=1;ins=(0,1)]"], "1");
}

#[test]
fn resolve_atoms_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[atoms]\n\"gw[N=1;g=1;ins=(0,1)]\" = \"-1/24\"\n").unwrap();
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--resolve-atoms",
        "invariant",
        "--N",
        "1",
        "--g",
        "1",
        "--ins",
        "2:pt",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["atomsResolved"], true);
    // (2/24 - 1/24) / c_2(2)
    assert_eq!(v["value"]["scalar"], "1/24");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["invariant", "--N", "2", "--g", "0", "--ins", "0:5"]).status.code(), Some(2));
    assert_eq!(run(&["invariant", "--N", "2", "--g", "0", "--ins", "x"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "dilaton", "--N", "2", "--g", "0", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "eo-compare", "--g", "2", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn verify_commands() {
    for args in [
        vec!["verify", "top", "--N", "1", "--g", "0", "--n", "4"],
        vec!["verify", "negative", "--N", "2", "--g", "0", "--k", "1,2", "--m", "4,7"],
        vec!["verify", "string-divisor", "--N", "1", "--g", "0", "--n", "2", "--m-max", "6"],
        vec!["verify", "dilaton", "--g", "0", "--n", "1", "--m-max", "6"],
        vec!["verify", "eo-compare", "--g", "0", "--n", "3", "--depth", "6"],
        vec!["verify", "eo-string", "--g", "1", "--n", "1", "--m", "1"],
        vec!["verify", "pole", "--g", "1", "--n", "1"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert_eq!(json(&o)["status"], "pass", "{args:?}");
    }
}

#[test]
fn example_f_fails_on_the_stated_recursion() {
    let o = run(&["verify", "example-f", "--max-m", "12"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["witness"]["part"], "f(m) = (1 - 1/d) f(m-2) - 1");
}

#[test]
fn asymptotics_inconclusive_without_atoms() {
    let o = run(&["verify", "asymptotics", "--N", "1", "--g", "1", "--ray", "1", "--m-max", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["status"], "inconclusive-atoms");
}

#[test]
fn psi_and_point() {
    let v = json(&run(&["psi", "--g", "2", "--beta", "4"]));
    assert_eq!(v["value"], "1/1152");
    let o = run(&["n0", "--g", "1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["n0", "--g", "1"]).status.code(), Some(2));
}

#[test]
fn eo_differential() {
    let v = json(&run(&["eo", "--g", "1", "--n", "1", "--expand", "4"]));
    assert!(v["differential"]["coeffs"].as_array().unwrap().len() == 6);
    assert!(v["expansion"]["coeffs"].is_array());
}

#[test]
fn cache_round_trip_and_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let c = cache.to_str().unwrap();
    let o = run(&["--cache", c, "invariant", "--N", "2", "--g", "0", "--ins", "4:pt,3:pt"]);
    assert_eq!(o.status.code(), Some(0));
    let first = std::fs::read_to_string(&cache).unwrap();
    assert!(!first.is_empty());
    // loading and saving again reproduces the file
    let again = dir.path().join("again.jsonl");
    let o = run(&["--cache", c, "cache", "save", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&again).unwrap(), first);

    let line = first.lines().next().unwrap();
    let v: Value = serde_json::from_str(line).unwrap();
    let bad = format!(
        "{{\"key\":{},\"value\":{{\"scalar\":\"12345\",\"atoms\":{{}}}}}}\n",
        v["key"]
    );
    let conflict = dir.path().join("bad.jsonl");
    std::fs::write(&conflict, bad).unwrap();
    let o = run(&["--cache", c, "cache", "load", conflict.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let v = json(&run(&["cache", "load", empty.to_str().unwrap()]));
    assert_eq!(v["loaded"], 0);
}

fn golden(name: &str, args: &[&str]) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let expected = std::fs::read_to_string(path).unwrap();
    let o = run(args);
    assert_eq!(String::from_utf8_lossy(&o.stdout), expected, "{name}");
}

#[test]
fn golden_table_rows() {
    for (n_target, g, n) in [(1, 0, 2), (1, 0, 3), (1, 0, 4), (1, 1, 1), (1, 1, 2), (2, 0, 3), (2, 1, 1)] {
        let (a, b, c) = (n_target.to_string(), g.to_string(), n.to_string());
        golden(
            &format!("table_N{a}_g{b}_n{c}.jsonl"),
            &["verify", "table", "--N", &a, "--g", &b, "--n", &c],
        );
    }
    golden("fit_N1_g1_n1.jsonl", &["fit", "--N", "1", "--g", "1", "--n", "1"]);
    golden("fit_N2_g0_n3.jsonl", &["fit", "--N", "2", "--g", "0", "--n", "3"]);
}
