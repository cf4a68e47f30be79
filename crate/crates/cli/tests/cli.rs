use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracbal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracbal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_build(dir: &Path, name: &str) -> String {
    let out = fracbal(&["build", name]);
    assert!(out.status.success());
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn build_w_prime_has_16_vertices() {
    let out = fracbal(&["build", "w-prime"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 16);
}

#[test]
fn build_sizes() {
    for (name, n) in [("k3-minus", 3), ("k4-minus", 4), ("w-hat", 10), ("w", 10), ("w1", 34)] {
        let v = stdout_json(&fracbal(&["build", name]));
        assert_eq!(v["vertices"].as_array().unwrap().len(), n, "{name}");
    }
}

#[test]
fn g_seq_beyond_guard_exits_3() {
    let out = fracbal(&["build", "g-seq", "--i", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reproduce_lemma_lists_ten_sets() {
    let out = fracbal(&["reproduce", "lemma-3.1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("PASS lemma-3.1"));
    for i in 1..=10 {
        assert!(text.contains(&format!("B{i}: {{")), "missing B{i}");
    }
    assert!(text.contains("B1: {u, v, x1, x2, x4}"));
}

#[test]
fn unknown_criterion_is_a_usage_error() {
    assert_eq!(fracbal(&["reproduce", "no-such-criterion"]).status.code(), Some(2));
}

#[test]
fn bad_subcommand_is_a_usage_error() {
    assert_eq!(fracbal(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn enumerate_through_terminals() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_build(dir.path(), "w-hat");
    let out = fracbal(&["enumerate", "--property", "balanced", "--maximal", "--contains", "u,v", &g]);
    assert_eq!(out.status.code(), Some(0));
    let sets = stdout_json(&out);
    let sets = sets.as_array().unwrap();
    assert_eq!(sets.len(), 8);
    assert!(sets.iter().all(|s| {
        let s: Vec<&str> = s.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
        s.contains(&"u") && s.contains(&"v")
    }));
}

#[test]
fn solve_small_gadgets() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write_build(dir.path(), "k3-minus");
    let k4 = write_build(dir.path(), "k4-minus");
    assert_eq!(stdout_json(&fracbal(&["solve", "chi-fb", &k3]))["optimum"], "3/2");
    assert_eq!(stdout_json(&fracbal(&["solve", "chi-fb", &k4]))["optimum"], "2");
    let cg = stdout_json(&fracbal(&["solve", "chi-fb", "--column-generation", &k4]));
    assert_eq!(cg["upper"], "2");
    assert_eq!(cg["converged"], true);
}

#[test]
fn verify_fixture_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_build(dir.path(), "w-hat");
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/table2.json");
    let out = fracbal(&["verify", &g, fixture]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["ok"], true);

    let mut cert: Value = serde_json::from_str(&fs::read_to_string(fixture).unwrap()).unwrap();
    let everything: Value = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    cert["classes"][0]["set"] = everything["vertices"].clone();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, cert.to_string()).unwrap();
    let out = fracbal(&["verify", &g, bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["ok"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_certificate_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_build(dir.path(), "w-hat");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"p\": 3").unwrap();
    assert_eq!(fracbal(&["verify", &g, bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn compose_one_apex() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    fs::write(
        &trace,
        r#"{"base":"K3_MINUS","steps":[{"op":"inner_k4","face":["a","b","c"]}]}"#,
    )
    .unwrap();
    let out = fracbal(&["compose-8341", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["certificate"]["p"], 83);
    assert_eq!(v["graph"]["vertices"].as_array().unwrap().len(), 4);
}

#[test]
fn audit_triangle_with_threshold() {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/table1.json");
    let strict = fracbal(&["audit-triangle", fixture, "--triangle", "w,x1,x2", "--sign", "-1"]);
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(stdout_json(&strict)["missing"], 4);
    let relaxed = fracbal(&[
        "audit-triangle",
        fixture,
        "--triangle",
        "w,x1,x2",
        "--sign",
        "-1",
        "--threshold",
        "4",
    ]);
    assert_eq!(relaxed.status.code(), Some(0));
}

#[test]
fn bounds_outputs() {
    let v = stdout_json(&fracbal(&["bounds", "thresholds"]));
    assert_eq!(v["threshold_83_41"], "83/41");
    assert_eq!(v["threshold_172_85"], "172/85");
    assert_eq!(v["threshold_52_25"], "52/25");
    let mu = stdout_json(&fracbal(&["bounds", "mu", "--p", "2", "--q", "1", "--i", "5"]));
    assert_eq!(mu["mu_closed_form"], mu["mu_recurrence"]);
    assert_eq!(mu["first_infeasible_index"], 1);
    assert_eq!(fracbal(&["bounds", "mu", "--p", "1", "--q", "1"]).status.code(), Some(2));
}

#[test]
fn checks_pass() {
    for which in ["lemma-3.1", "forest-lemmas", "triangle-signs"] {
        let out = fracbal(&["--json", "check", which]);
        assert_eq!(out.status.code(), Some(0), "{which}");
        stdout_json(&out);
    }
}

#[test]
fn output_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_build(dir.path(), "w-prime");
    let one = fracbal(&["--threads", "1", "enumerate", "--maximal", &g]);
    let four = fracbal(&["--threads", "4", "enumerate", "--maximal", &g]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k4.json");
    let out = fracbal(&["build", "k4-minus", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
}
