use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/diagrams").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl3web")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn ranks(groups: &Value) -> Vec<(i64, i64, u64)> {
    groups
        .as_array()
        .unwrap()
        .iter()
        .map(|g| (g["h"].as_i64().unwrap(), g["q"].as_i64().unwrap(), g["free"].as_u64().unwrap()))
        .collect()
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

#[test]
fn theta_homology_ranks() {
    let out = run(&["homology", &path("theta.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r: Vec<u64> = ranks(&json(&out)).into_iter().map(|g| g.2).collect();
    assert_eq!(r, vec![1, 2, 2, 1]);
}

#[test]
fn normalized_unknot_is_three_dimensional() {
    let out = run(&["homology", &path("unknot.json"), "--normalize"]);
    let r = ranks(&json(&out));
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|g| g.0 == 0 && g.2 == 1));
    assert_eq!(r[1].1 - r[0].1, 2);
    assert_eq!(r[2].1 - r[1].1, 2);
}

#[test]
fn empty_diagram() {
    let out = run(&["homology", &path("empty.json")]);
    assert_eq!(ranks(&json(&out)), vec![(0, 0, 1)]);
}

#[test]
fn pointed_theta() {
    let out = run(&["pointed", &path("theta.json"), "--marks", "e1,e2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pointed_rank"], 4);
    assert_eq!(v["koszul_rank"], 4);
    assert_eq!(v["bound_holds"], true);
    assert!(!String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn pointed_warns_without_a_meridian_basis() {
    let out = run(&["pointed", &path("theta.json"), "--marks", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn check_theta_verdicts() {
    let out = run(&["check-theta", &path("theta.json")]);
    let v = json(&out);
    assert_eq!(v["module_isomorphic"], true);
    assert_eq!(v["rank_is_four"], true);
    assert_eq!(v["planar_theta_signature"], true);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(b)") && err.contains("(c)") && err.contains("planar theta signature"));

    let v = json(&run(&["check-theta", &path("knotted_theta.json")]));
    assert_eq!(v["planar_theta_signature"], false);
}

#[test]
fn euler_matches_bracket() {
    let v = json(&run(&["euler", &path("trefoil_right.json")]));
    assert_eq!(v["agree"], true);
    assert_eq!(v["euler_characteristic"], v["kuperberg_bracket"]);
}

#[test]
fn invariance_passes() {
    for spec in ["RV:0", "RV", "RI", "RII:0"] {
        let out = run(&["invariance", &path("theta.json"), "--move", spec]);
        assert_eq!(out.status.code(), Some(0), "{spec}");
        let v = json(&out);
        assert_eq!(v["verdict"], "PASS");
        assert!(!v["moves"].as_array().unwrap().is_empty());
    }
    let out = run(&["invariance", &path("theta_twisted.json"), "--move", r#"{"move":"untwist","side":{"arc":0,"left":false}}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["moves"][0]["kind"], "V");
}

#[test]
fn f2_coefficients() {
    let z = json(&run(&["homology", &path("trefoil_right.json"), "--coefficients", "z"]));
    let f2 = json(&run(&["homology", &path("trefoil_right.json"), "--coefficients", "f2"]));
    let free: u64 = ranks(&z).iter().map(|g| g.2).sum();
    let even_torsion = z
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|g| g["torsion"].as_array().unwrap())
        .filter(|t| t.as_u64().unwrap() % 2 == 0)
        .count() as u64;
    let f2_rank: u64 = ranks(&f2).iter().map(|g| g.2).sum();
    assert_eq!(f2_rank, free + 2 * even_torsion);
    assert!(z.as_array().unwrap().iter().any(|g| g["torsion"] == serde_json::json!([3])));
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"arcs":2,"joins":[[0,5]]}"#).unwrap();
    assert_eq!(run(&["homology", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&["homology", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["homology", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["invariance", &path("theta.json"), "--move", "RV:99"]).status.code(), Some(2));
    assert_eq!(run(&["pointed", &path("theta.json")]).status.code(), Some(2));
    assert_eq!(run(&["pointed", &path("theta.json"), "--marks", "x"]).status.code(), Some(2));
    assert_eq!(run(&["check-theta", &path("hopf_pos.json")]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("out.json");
    let args = |o: &str| {
        vec![
            "homology".to_string(),
            path("hopf_pos.json"),
            "--cache".into(),
            cache.display().to_string(),
            "--out".into(),
            o.to_string(),
        ]
    };
    let a: Vec<String> = args(out.to_str().unwrap());
    let a: Vec<&str> = a.iter().map(String::as_str).collect();
    assert_eq!(run(&a).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    assert_eq!(run(&a).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);
    assert_eq!(run(&["homology", &path("hopf_pos.json")]).stdout, first);
}

#[test]
fn batch_over_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["theta.json", "unknot.json", "hopf_neg.json"] {
        std::fs::copy(data(name), dir.path().join(name)).unwrap();
    }
    let out = run(&["batch", dir.path().to_str().unwrap(), "--task", "euler", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 3);
    assert!(items.iter().all(|i| i["result"]["agree"] == true));
    let files: Vec<&str> = items.iter().map(|i| i["file"].as_str().unwrap()).collect();
    let mut sorted = files.clone();
    sorted.sort();
    assert_eq!(files, sorted);
}
