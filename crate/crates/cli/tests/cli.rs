use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use matchnuc::{Allocation, GameFormat, GameInstance};
use serde_json::Value;

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchnuc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn allocation(value: &Value) -> BTreeMap<String, String> {
    serde_json::from_value(value["result"]["allocation"].clone()).unwrap()
}

#[test]
fn five_cycle_compact() {
    let r = report(&["solve", &data("fivecycle.json"), "--method", "compact"]);
    let expected: BTreeMap<String, String> = [("1", "7/5"), ("2", "2/5"), ("3", "2/5"), ("4", "2/5"), ("5", "2/5")]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    assert_eq!(allocation(&r), expected);
    assert_eq!(r["result"]["method"], "compact");
    assert_eq!(r["command"], "solve");
}

#[test]
fn equal_split_on_a_single_edge() {
    let r = report(&["solve", &data("k2.json")]);
    assert_eq!(r["result"]["allocation"]["1"], "1/2");
    assert_eq!(r["result"]["allocation"]["2"], "1/2");
}

#[test]
fn check_runs_the_oracle() {
    for file in ["fivecycle.json", "triangle.txt", "path3.txt", "four_cycle.txt", "two_triangles.txt"] {
        let r = report(&["solve", &data(file), "--check"]);
        let checks: Vec<&str> = r["checks_passed"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
        assert!(checks.contains(&"oracle-match"), "{file}: {checks:?}");
    }
}

#[test]
fn bruteforce_method_agrees() {
    let compact = report(&["solve", &data("two_triangles.txt")]);
    let brute = report(&["solve", &data("two_triangles.txt"), "--method", "bruteforce"]);
    assert_eq!(allocation(&compact), allocation(&brute));
    assert_eq!(brute["result"]["method"], "bruteforce");
}

#[test]
fn leastcore_values() {
    let cases = [("fivecycle.json", "-2/5", true), ("k2.json", "0", false), ("triangle.txt", "-1/3", true)];
    for (file, epsilon, empty) in cases {
        let r = report(&["leastcore", &data(file)]);
        assert_eq!(r["result"]["epsilon1"], epsilon, "{file}");
        assert_eq!(r["result"]["core_empty"], empty, "{file}");
    }
}

#[test]
fn decompose_dump() {
    let r = report(&["decompose", &data("fivecycle.json")]);
    let res = &r["result"];
    assert_eq!(res["laminar"], serde_json::json!([["1", "2", "3", "4", "5"]]));
    assert_eq!(res["representatives"], serde_json::json!(["1"]));
    assert_eq!(res["m_star"], serde_json::json!([["2", "3"], ["4", "5"]]));
    assert_eq!(res["e_plus"], serde_json::json!([]));
    assert_eq!(res["e_star"].as_array().unwrap().len(), 5);
    assert_eq!(res["epsilon1"], "-2/5");

    let t = report(&["decompose", &data("triangle.txt")]);
    assert_eq!(t["result"]["laminar"], serde_json::json!([["1", "2", "3"]]));
}

#[test]
fn decompose_rejects_nonempty_core() {
    let out = run(&["decompose", &data("k2.json")]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn parse_errors_exit_with_one() {
    let dir = std::env::temp_dir().join(format!("matchnuc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "3 2\n1 2 1\n").unwrap();
    assert_eq!(run(&["solve", bad.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.join("missing.txt");
    assert_eq!(run(&["leastcore", missing.to_str().unwrap()]).status.code(), Some(1));
    let loop_edge = dir.join("loop.json");
    std::fs::write(&loop_edge, r#"{"nodes":["a"],"edges":[{"u":0,"v":0,"w":1}]}"#).unwrap();
    assert_eq!(run(&["solve", loop_edge.to_str().unwrap()]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn outputs_are_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    let path = data("fivecycle.json");
    for args in [vec!["solve", &path, "--check"], vec!["decompose", &path], vec!["leastcore", &path]] {
        assert_eq!(strip(report(&args)), strip(report(&args)));
    }
    let a = strip(report(&["oracle", "--seed", "9", "--nodes", "5"]));
    let b = strip(report(&["oracle", "--seed", "9", "--nodes", "5"]));
    assert_eq!(a, b);
}

#[test]
fn allocation_round_trips_byte_for_byte() {
    let r = report(&["solve", &data("fivecycle.json")]);
    let emitted = serde_json::to_string(&r["result"]["allocation"]).unwrap();
    let game = GameInstance::load(&std::fs::read(data("fivecycle.json")).unwrap(), GameFormat::Json).unwrap();
    let parsed = Allocation::from_label_map(&game, &allocation(&r)).unwrap();
    let again = serde_json::to_string(&parsed.to_label_map(&game)).unwrap();
    assert_eq!(emitted, again);
}

#[test]
fn text_format_and_lp_dump() {
    let out = run(&["solve", &data("fivecycle.json"), "--format", "text", "--dump-lp"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("1: 7/5"), "{stdout}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("maximize"), "{stderr}");
}

#[test]
fn oracle_reports_theta_head() {
    let r = report(&["oracle", &data("fivecycle.json")]);
    let head = r["result"]["theta_head"].as_array().unwrap();
    assert_eq!(head.len(), 20);
    assert_eq!(head[0], "-2/5");
    assert_eq!(r["result"]["prekernel"], true);
}

#[test]
fn enumeration_bound_override() {
    let r = report(&["solve", &data("fivecycle.json"), "--max-enum", "0"]);
    assert_eq!(r["result"]["allocation"]["1"], "7/5");
}
