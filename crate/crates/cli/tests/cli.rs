use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn flatjet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatjet"))
        .args(args)
        .current_dir(dir)
        .env("FLATJET_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_instance(dir: &Path, text: &str) {
    fs::write(dir.join("instance.json"), text).unwrap();
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const TWO_POINT: &str = r#"{"n":1,"s":2.0,"points":[{"x":[0.0],"f":0.0},{"x":[1.0],"f":1.0}],
    "bound_box":{"lo":[-1.0],"hi":[2.0]},"grid":31}"#;

#[test]
fn decompose_singleton_lists_level_zero_cubes() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), r#"{"n":1,"s":2.0,"points":[{"x":[0.5],"f":1.0}],"bound_box":{"lo":[0.0],"hi":[1.0]}}"#);
    let out = flatjet(&["decompose", "--input", "instance.json", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let d = read_json(&dir.path().join("o/decomposition.json"));
    let cubes = d["cubes"].as_array().unwrap();
    assert_eq!(cubes.len(), 7);
    assert!(cubes.iter().all(|c| c["level"] == 0));
    assert!(dir.path().join("o/manifest.json").exists());
}

#[test]
fn max_level_is_respected() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), r#"{"n":1,"s":2.0,"points":[{"x":[0.5],"f":1.0},{"x":[0.5001],"f":1.0}]}"#);
    let out = flatjet(&["decompose", "--input", "instance.json", "--max-level", "12"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let out = flatjet(&["decompose", "--input", "instance.json", "--max-level", "20"], dir.path());
    assert!(out.status.success());
    let d = read_json(&dir.path().join("out/decomposition.json"));
    assert!(d["deepest_level"].as_u64().unwrap() <= 20);
}

#[test]
fn extend_two_point_example() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), TWO_POINT);
    let out = flatjet(&["extend", "--input", "instance.json", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/extension_grid.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x0,F"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let mut it = l.split(',').map(|v| v.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 31);
    let at = |x: f64| rows.iter().find(|r| (r.0 - x).abs() < 1e-12).unwrap().1;
    assert!(at(0.0).abs() < 1e-12);
    assert!((at(1.0) - 1.0).abs() < 1e-12);
    let report = read_json(&dir.path().join("o/jet_match.json"));
    assert!(report["normalized_max_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn all_zero_values_give_zero_grid() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), r#"{"n":2,"s":2.5,"points":[{"x":[0.0,0.0],"f":0.0},{"x":[0.5,0.2],"f":0.0}],"grid":9}"#);
    let out = flatjet(&["extend", "--input", "instance.json"], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("out/extension_grid.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').last().unwrap().parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn non_flat_field_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), r#"{"n":1,"s":2.0,"points":[{"x":[0.0],"jet":{"(1)":1.0}}]}"#);
    let out = flatjet(&["extend", "--input", "instance.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not flat"));
}

#[test]
fn malformed_input_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), "{\"n\": 1,");
    let out = flatjet(&["extend", "--input", "instance.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    write_instance(dir.path(), r#"{"n":1,"s":2.0,"points":[{"x":[0.0,1.0],"f":1.0}]}"#);
    let out = flatjet(&["extend", "--input", "instance.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points[0].x"));
    let out = flatjet(&["extend"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = flatjet(&["nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fdb_identity_echoes_jet_and_power_matches() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(
        dir.path(),
        r#"{"n":1,"s":3.0,"r":0.5,"jet":{"basepoint":[4.0],"degree":2,"coeffs":{"0":4.0,"1":1.0}}}"#,
    );
    let out = flatjet(&["fdb", "--input", "instance.json", "--identity"], dir.path());
    assert!(out.status.success());
    let r = read_json(&dir.path().join("out/fdb.json"));
    assert_eq!(r["input"], r["output"]);
    let out = flatjet(&["fdb", "--input", "instance.json"], dir.path());
    assert!(out.status.success());
    let r = read_json(&dir.path().join("out/fdb.json"));
    assert_eq!(r["output"]["coeffs"]["2"].as_f64(), Some(-1.0 / 32.0));
}

#[test]
fn root_on_square_is_finite() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(
        dir.path(),
        r#"{"n":1,"s":2.0,"r":0.5,"grid":201,"bound_box":{"lo":[-1.0],"hi":[1.0]},
            "family":[{"kind":"polynomial","jet":{"basepoint":[0.0],"degree":2,"coeffs":{"2":2.0}}}]}"#,
    );
    let out = flatjet(&["root", "--input", "instance.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("out/root.json"));
    let ratio = r["max_ratio"].as_f64().unwrap();
    assert!(ratio.is_finite() && ratio > 0.0);
    // |x| on [-1, 1]: sup 1 plus Lipschitz constant 1
    assert!((r["members"][0]["fs_root"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn finiteness_singleton_ratio_is_one() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), r#"{"n":1,"s":2.0,"points":[{"x":[0.3],"f":0.09}]}"#);
    let out = flatjet(&["finiteness", "--input", "instance.json"], dir.path());
    assert!(out.status.success());
    let r = read_json(&dir.path().join("out/finiteness.json"));
    assert_eq!(r["ratio"].as_f64(), Some(1.0));
}

#[test]
fn finiteness_sampling_for_large_sets() {
    let dir = tempfile::tempdir().unwrap();
    let pts: Vec<String> = (0..16)
        .map(|i| format!(r#"{{"x":[{}],"f":{}}}"#, i as f64 / 16.0, (i as f64 / 16.0).powi(2)))
        .collect();
    write_instance(dir.path(), &format!(r#"{{"n":1,"s":2.0,"points":[{}]}}"#, pts.join(",")));
    let out = flatjet(&["finiteness", "--input", "instance.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample"));
    let out = flatjet(&["finiteness", "--input", "instance.json", "--sample", "6", "--k", "2"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("out/finiteness.json"));
    assert_eq!(r["points"].as_array().unwrap().len(), 6);
    assert!(r["ratio"].as_f64().unwrap() >= 1.0);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(
        dir.path(),
        r#"{"n":1,"s":2.0,"points":[{"x":[0.0],"f":0.5},{"x":[0.4],"f":0.1},{"x":[1.0],"f":0.9}],"grid":50}"#,
    );
    for cmd in ["fuzz-convexity", "extend", "eval-grid"] {
        let a = flatjet(&[cmd, "--input", "instance.json", "--out", "a", "--seed", "4", "--trials", "50"], dir.path());
        let b = flatjet(&[cmd, "--input", "instance.json", "--out", "b", "--seed", "4", "--trials", "50"], dir.path());
        assert!(a.status.success() && b.status.success());
    }
    for name in ["fuzz.json", "extension_grid.csv", "eval_grid.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let m = read_json(&dir.path().join("a/manifest.json"));
    assert_eq!(m["command"], "eval-grid");
    assert_eq!(m["seed"], 4);
    assert_eq!(m["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn eval_jets_and_norms() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(
        dir.path(),
        r#"{"n":1,"s":2.0,"points":[{"x":[0.0],"f":0.0},{"x":[1.0],"f":1.0}],"eval_points":[[1.0],[0.0]],
            "bound_box":{"lo":[-1.0],"hi":[2.0]},"grid":101,
            "family":[{"kind":"polynomial","jet":{"basepoint":[0.0],"degree":2,"coeffs":{"2":2.0}}}]}"#,
    );
    let out = flatjet(&["eval-jets", "--input", "instance.json"], dir.path());
    assert!(out.status.success());
    let j = read_json(&dir.path().join("out/eval_jets.json"));
    assert!((j[0]["jet"]["0"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let out = flatjet(&["norms", "--input", "instance.json"], dir.path());
    assert!(out.status.success());
    let n = read_json(&dir.path().join("out/norms.json"));
    assert!((n["family"][0]["norms"]["flat"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert_eq!(n["field"]["sup"].as_f64(), Some(1.0));
}
