use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gqcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gqcov")).args(args).env_remove("GQCOV_CACHE").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn construct_subtend_factorize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let geom = dir.path().join("q5q4.json");
    let out = gqcov(&["construct", "--family", "q5q4", "--q", "2", "--out", p(&geom)]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["points"], 27);
    assert_eq!(report["schema_version"], 1);
    let emb = dir.path().join("q5q4.embedding.json");
    assert!(emb.exists());

    let pair = dir.path().join("pair");
    let out = gqcov(&["subtend", "--ambient", p(&geom), "--embedding", p(&emb), "--out", p(&pair)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["census"]["uniform"], 2);
    for f in ["A.json", "E.json", "pi.json", "census.json"] {
        assert!(pair.join(f).exists(), "{f}");
    }

    let out = gqcov(&["factorize", "--pair", p(&pair), "--cover", p(&pair.join("pi.json"))]);
    assert!(out.status.success());
    assert_eq!(json(&out)["factorization"]["orientation"], "Forward");

    let covers = dir.path().join("covers.json");
    let out = gqcov(&["enumerate-covers", "--pair", p(&pair), "--out", p(&covers)]);
    let report = json(&out);
    assert_eq!((report["covers"].as_u64(), report["verdict"].as_str()), (Some(720), Some("pass")));

    let out = gqcov(&["reconstruct", "--pair", p(&pair), "--cover", p(&pair.join("pi.json"))]);
    assert_eq!(json(&out)["isomorphic_to_ambient"], true);

    let out = gqcov(&["spg-check", "--geometry", p(&pair.join("E.json")), "--expect", "1,4,2,4"]);
    assert!(out.status.success());
    let out = gqcov(&["spg-check", "--geometry", p(&pair.join("E.json")), "--expect", "1,4,3,4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "fail");
}

#[test]
fn a_non_cover_fails_factorization_with_a_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let geom = dir.path().join("g.json");
    assert!(gqcov(&["construct", "--family", "q5q4", "--q", "2", "--out", p(&geom)]).status.success());
    let pair = dir.path().join("pair");
    assert!(gqcov(&["subtend", "--ambient", p(&geom), "--embedding", p(&dir.path().join("g.embedding.json")), "--out", p(&pair)])
        .status
        .success());
    let mut pi: Value = serde_json::from_slice(&std::fs::read(pair.join("pi.json")).unwrap()).unwrap();
    pi["points"][0] = pi["points"][1].clone();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_vec(&pi).unwrap()).unwrap();
    let out = gqcov(&["factorize", "--pair", p(&pair), "--cover", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "fail");
}

#[test]
fn aut_stabilize_and_extend() {
    let dir = tempfile::tempdir().unwrap();
    let geom = dir.path().join("q4q3.json");
    assert!(gqcov(&["construct", "--family", "q4q3", "--q", "2", "--out", p(&geom)]).status.success());
    let out = gqcov(&["aut", "--geometry", p(&geom)]);
    assert_eq!(json(&out)["order"], "720");
    let emb: Value = serde_json::from_slice(&std::fs::read(dir.path().join("q4q3.embedding.json")).unwrap()).unwrap();
    let subset = dir.path().join("grid.json");
    std::fs::write(&subset, serde_json::to_vec(&serde_json::json!({"points": emb["points"], "lines": emb["lines"]})).unwrap()).unwrap();
    let out = gqcov(&["aut", "--geometry", p(&geom), "--stabilize", p(&subset)]);
    assert_eq!(json(&out)["order"], "72");

    let grid_points = emb["points"].as_array().unwrap().len();
    let grid_lines = emb["lines"].as_array().unwrap().len();
    let phi = dir.path().join("phi.json");
    let id = serde_json::json!({"points": (0..grid_points).collect::<Vec<_>>(), "lines": (0..grid_lines).collect::<Vec<_>>()});
    std::fs::write(&phi, serde_json::to_vec(&id).unwrap()).unwrap();
    let out = gqcov(&["extend", "--ambient", p(&geom), "--embedding", p(&dir.path().join("q4q3.embedding.json")), "--phi", p(&phi), "--all"]);
    let report = json(&out);
    assert_eq!((report["count"].as_u64(), report["kernel_order"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn condition_c_reports_each_instance() {
    let dir = tempfile::tempdir().unwrap();
    let geom = dir.path().join("g.json");
    assert!(gqcov(&["construct", "--family", "q5q4", "--q", "2", "--out", p(&geom)]).status.success());
    let pair = dir.path().join("pair");
    assert!(gqcov(&["subtend", "--ambient", p(&geom), "--embedding", p(&dir.path().join("g.embedding.json")), "--out", p(&pair)])
        .status
        .success());
    let out = gqcov(&["condition-c", "--pair", p(&pair), "--samples", "20", "--seed", "4"]);
    let report = json(&out);
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["instances"].as_array().unwrap().len(), 40);
    assert_eq!(gqcov(&["condition-c", "--pair", p(&pair), "--samples", "20", "--seed", "4"]).stdout, out.stdout);
}

#[test]
fn suite_without_cache_and_build_is_a_missing_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gqcov"))
        .args(["suite", "spg-all", "--out", p(&dir.path().join("out")), "--no-build"])
        .env("GQCOV_CACHE", dir.path().join("nothing"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing input"), "{err}");
}

#[test]
fn suite_writes_a_manifest_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = |out: &str, extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_gqcov"))
            .args(["suite", "higher-q2q3", "--out", p(&dir.path().join(out))])
            .args(extra)
            .env("GQCOV_CACHE", &cache)
            .output()
            .unwrap()
    };
    let first = run("a", &[]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run("b", &["--no-build"]);
    assert!(second.status.success());
    let strip = |dir: &str| {
        let mut v: Value = serde_json::from_slice(&std::fs::read(Path::new(&dir).join("manifest.json")).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timings");
        v["parameters"]["no_build"] = Value::Bool(false);
        v
    };
    let a = strip(p(&dir.path().join("a")));
    assert_eq!(a, strip(p(&dir.path().join("b"))));
    assert_eq!(a["verdict"], "pass");
    assert!(a["inputs"]["q5q4-3/geometry.json"].as_str().unwrap().len() == 64);
}
