use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use bimonotone::generate::FixtureTruthDoc;
use bimonotone::io::to_json_bytes;
use bimonotone::FixtureSpec;
use nalgebra::DMatrix;
use serde_json::Value;

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bimonotone-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn bin(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bimonotone"))
        .args(args)
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1, "exactly one JSON document: {stdout}");
    let doc = serde_json::from_str(&stdout).unwrap();
    (out.status.code().unwrap(), doc, String::from_utf8(out.stderr).unwrap())
}

fn write_spec(dir: &Path, name: &str, spec: &FixtureSpec) -> String {
    let p = dir.join(name);
    fs::write(&p, to_json_bytes(spec)).unwrap();
    p.display().to_string()
}

fn generate(dir: &Path, name: &str, spec: &FixtureSpec, extra: &[&str]) -> String {
    let spec_path = write_spec(dir, &format!("{name}.spec.json"), spec);
    let out = dir.join(format!("{name}.json")).display().to_string();
    let mut args = vec!["generate", spec_path.as_str(), "--out", out.as_str()];
    args.extend_from_slice(extra);
    let (code, doc, _) = bin(&args);
    assert_eq!(code, 0);
    assert_eq!(doc["graph"], Value::String(out.clone()));
    out
}

#[test]
fn analyze_constant_fixture() {
    let dir = workdir("constant");
    let mut spec = FixtureSpec::new(3, 3, 6, 1);
    spec.zero_operator = true;
    let graph = generate(&dir, "const", &spec, &[]);
    let before: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    let (code, doc, _) = bin(&["analyze", &graph]);
    assert_eq!(code, 0);
    assert_eq!(doc["monotone"]["verdict"], true);
    assert_eq!(doc["bimonotone"]["verdict"], true);
    assert_eq!(doc["paramonotone"]["status"], "checked");
    assert_eq!(doc["paramonotone"]["verdict"], true);
    assert_eq!(doc["constant_on_domain"]["verdict"], true);
    let after: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(before, after, "analyze must not write files");
}

#[test]
fn decompose_skew_fixture_matches_truth() {
    let dir = workdir("skew");
    let mut spec = FixtureSpec::new(5, 3, 8, 2024);
    spec.branches = 2;
    spec.noise_orthogonal = 1.0;
    let graph = generate(&dir, "skew", &spec, &[]);
    let truth: FixtureTruthDoc = serde_json::from_slice(&fs::read(dir.join("skew.truth.json")).unwrap()).unwrap();
    let out = dir.join("dec.json").display().to_string();
    let (code, doc, _) = bin(&["decompose", &graph, "--out", &out]);
    assert_eq!(code, 0);
    assert!(doc["skewness_defect"].as_f64().unwrap() <= 1e-10);
    assert!(doc["max_residual"].as_f64().unwrap() <= 1e-10);

    let rows = |v: &Value| -> Vec<Vec<f64>> {
        v.as_array()
            .unwrap()
            .iter()
            .map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
            .collect()
    };
    let q_rows = rows(&doc["basis"]);
    let q = DMatrix::from_row_iterator(5, 3, q_rows.iter().flatten().copied());
    let a_rows = rows(&doc["a_hat"]);
    let a = DMatrix::from_row_iterator(3, 3, a_rows.iter().flatten().copied());
    let expected = q.transpose() * truth.a0() * &q;
    assert!((a - expected).amax() <= 1e-9);

    // the file written with --out holds the same document
    let file: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(file, doc);
    let (code, report, _) = bin(&["verify", &out, &graph]);
    assert_eq!(code, 0);
    assert_eq!(report["verdict"], true);
}

#[test]
fn analyze_perturbed_fixture_fails_with_witness() {
    let dir = workdir("perturbed");
    let mut spec = FixtureSpec::new(4, 3, 7, 5);
    spec.noise_in_span = 1e-3;
    let graph = generate(&dir, "bad", &spec, &[]);
    let (code, doc, _) = bin(&["analyze", &graph]);
    assert_eq!(code, 1);
    assert_eq!(doc["bimonotone"]["verdict"], false);
    assert_eq!(doc["bimonotone"]["witness"].as_array().unwrap().len(), 2);

    let (code, doc, stderr) = bin(&["decompose", &graph]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"], "not_bimonotone");
    assert!(doc["report"]["witness"].is_array());
    assert!(!stderr.is_empty());
}

#[test]
fn verify_flags_foreign_graph() {
    let dir = workdir("verify");
    let g1 = generate(&dir, "a", &FixtureSpec::new(3, 2, 5, 10), &[]);
    let g2 = generate(&dir, "b", &FixtureSpec::new(3, 2, 5, 11), &[]);
    let dec = dir.join("a.dec.json").display().to_string();
    assert_eq!(bin(&["decompose", &g1, "--out", &dec]).0, 0);
    let (code, report, _) = bin(&["verify", &dec, &g2]);
    assert_eq!(code, 1);
    assert_eq!(report["verdict"], false);
    let g3 = generate(&dir, "c", &FixtureSpec::new(4, 2, 5, 11), &[]);
    assert_eq!(bin(&["verify", &dec, &g3]).0, 2);
}

#[test]
fn csv_and_flag_overrides() {
    let dir = workdir("csv");
    let graph = dir.join("g.csv").display().to_string();
    let spec_path = write_spec(&dir, "s.json", &FixtureSpec::new(3, 3, 6, 1));
    let (code, _, _) = bin(&[
        "generate", &spec_path, "--out", &graph, "--format", "csv", "--seed", "9",
    ]);
    assert_eq!(code, 0);
    let truth: FixtureTruthDoc = serde_json::from_slice(&fs::read(dir.join("g.truth.json")).unwrap()).unwrap();
    assert_eq!(truth.spec.seed, 9);
    let (code, doc, _) = bin(&[
        "analyze",
        &graph,
        "--format",
        "csv",
        "--tol-abs",
        "1e-8",
        "--tol-rel",
        "0",
    ]);
    assert_eq!(code, 0);
    assert_eq!(doc["points"], 6);
    let (code, doc, _) = bin(&["decompose", &graph, "--format", "csv", "--basepoint", "99"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"], "usage");
}

#[test]
fn parse_errors_exit_two() {
    let dir = workdir("parse");
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"dimension":2,"points":[{"x":[0,0,1],"xstar":[0,0]}]}"#).unwrap();
    let (code, doc, stderr) = bin(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"], "parse");
    assert!(stderr.contains("expected 2"));
    let (code, _, _) = bin(&["analyze"]);
    assert_eq!(code, 2);
}
