use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn blockade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn repo_file(rel: &str) -> String {
    format!("{}/../../{rel}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn cograph_check_prints_cotree_or_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let p4 = write(
        dir.path(),
        "p4.json",
        r#"{"n":4,"edges":[[0,1],[1,2],[2,3]]}"#,
    );
    let o = blockade(&["cograph", "check", p4.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "NOT COGRAPH\n");

    let c4 = write(
        dir.path(),
        "c4.json",
        r#"{"n":4,"edges":[[0,1],[1,2],[2,3],[0,3]]}"#,
    );
    let o = blockade(&["cograph", "check", c4.to_str().unwrap()]);
    let tree: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(tree.get("join").is_some());

    let o = blockade(&["cograph", "largest", p4.to_str().unwrap(), "--limit", "10"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["size"], 3);
    assert_eq!(v["vertices"], serde_json::json!([0, 1, 2]));
}

#[test]
fn malformed_graph_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"n":2,"edges":[[0,0]]}"#);
    let o = blockade(&["cograph", "check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn gen_is_deterministic_and_writes_csv() {
    let spec = r#"{"kind":"gnp","n":8,"p":0.5}"#;
    let a = blockade(&["gen", spec, "--seed", "4", "--trials", "3"]);
    let b = blockade(&["gen", spec, "--seed", "4", "--trials", "3"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k5.csv");
    let o = blockade(&[
        "gen",
        r#"{"kind":"gnp","n":5,"p":1.0}"#,
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().next(), Some("index,seed,u,v"));
    assert_eq!(text.lines().count(), 1 + 10);
}

#[test]
fn k2_check_with_blockade() {
    let dir = tempfile::tempdir().unwrap();
    // Vertex 2 sees both 0 and 1, which lie in different blocks.
    let g = write(dir.path(), "g.json", r#"{"n":3,"edges":[[0,2],[1,2]]}"#);
    let b = write(dir.path(), "b.json", r#"{"blocks":[[0],[1],[2]]}"#);
    let o = blockade(&[
        "k2",
        "check",
        "--graph",
        g.to_str().unwrap(),
        "--k",
        "2",
        "--blockade",
        b.to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rainbow_free"], false);
    assert_eq!(v["violation"]["tuple"], serde_json::json!([0, 1]));
}

#[test]
fn comb_build_and_wg() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"n":4,"edges":[[0,2],[1,3]]}"#);
    let o = blockade(&[
        "comb",
        "build",
        "--graph",
        g.to_str().unwrap(),
        "--A",
        "0-1",
        "--B",
        "2,3",
        "--gamma",
        "1",
        "--d",
        "0.5",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["result"]["branch"], "comb");

    let o = blockade(&["comb", "wg", "--graph", g.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 4);
}

#[test]
fn lemma_constants_and_run() {
    let o = blockade(&["lemma", "constants", "--k", "3", "--d", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["big_k"], 2.0);
    assert_eq!(v["l0"], 1_175_671_472u64);
    assert_eq!(v["d_table"][0], serde_json::json!([1, "4"]));

    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"n":8,"edges":[]}"#);
    let b = write(
        dir.path(),
        "b.json",
        r#"{"blocks":[[0,1],[2,3],[4,5],[6,7]]}"#,
    );
    let common = [
        "lemma",
        "run",
        "--graph",
        g.to_str().unwrap(),
        "--blockade",
        b.to_str().unwrap(),
        "--k",
        "3",
        "--d",
        "2",
        "--tau",
        "0.01",
    ];
    let o = blockade(&[&common[..], &["--relax", "width=0.5,len=0.5"]].concat());
    assert!(o.status.success());
    let trace: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(trace["outcome"]["outcome"], "case-two");

    let o = blockade(&[&common[..], &["--strict"]].concat());
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!v["refused"]["unmet"].as_array().unwrap().is_empty());
}

#[test]
fn suite_smoke_config_passes() {
    let o = blockade(&["suite", &repo_file("suites/smoke.toml")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let aggregates: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|v| v.get("aggregate").is_some())
        .collect();
    assert_eq!(aggregates.len(), 4);
    assert_eq!(aggregates[0]["aggregate"]["trials"], 1024);
}

#[test]
fn suite_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(
        dir.path(),
        "empty.toml",
        "[[suite]]\nname = \"none\"\ntrials = 0\ncheck = \"symmetry\"\nk = 2\n\
         generator = { kind = \"gnp\", n = 4, p = 0.5 }\n",
    );
    let o = blockade(&["suite", empty.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);

    // A plain random graph carries no cotree, so every trial fails.
    let failing = write(
        dir.path(),
        "fail.toml",
        "[[suite]]\nname = \"bad\"\ntrials = 2\ncheck = \"homogeneous\"\n\
         generator = { kind = \"gnp\", n = 4, p = 0.5 }\n",
    );
    let o = blockade(&["suite", failing.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("suite,index,seed,pass,outcome,detail"));

    let broken = write(
        dir.path(),
        "broken.toml",
        "[[suite]]\nname = \"x\"\ncheck = \"nope\"\n",
    );
    let o = blockade(&["suite", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
