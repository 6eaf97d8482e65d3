use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reduced-topos"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(cmd: &str, cfg: &str, extra: &[&str]) -> (i32, Value) {
    let path = config(cfg);
    let mut args = vec![cmd, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

fn failed_checks(v: &Value) -> Vec<String> {
    v["verification"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["passed"].as_bool().unwrap())
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect()
}

fn temp_config(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

#[test]
fn build_qubit() {
    let (code, v) = report("build", "qubit.json", &[]);
    assert_eq!(code, 0);
    let b = &v["build"];
    assert_eq!(b["contexts"].as_array().unwrap().len(), 3);
    assert_eq!(b["selector_valid"], true);
    assert_eq!(b["spectrum_points"], 5);
}

#[test]
fn build_without_generators_has_one_context() {
    let f = temp_config(r#"{"hilbert_dim": 2}"#);
    let out = run(&["build", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["build"]["contexts"].as_array().unwrap().len(), 1);
}

#[test]
fn input_errors_exit_with_two() {
    let f = temp_config(
        r#"{"hilbert_dim": 3, "operators": {"sz": [[[1,0],[0,0]],[[0,0],[-1,0]]]},
            "contexts": [{"label": "Vz", "generators": ["sz"]}]}"#,
    );
    let out = run(&["build", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("operators.sz"));

    let f = temp_config("{\n  \"hilbert_dim\": 2,\n  \"bogus\": 1\n}");
    let out = run(&["build", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert_eq!(
        run(&["build", "--config", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
}

fn row<'a>(v: &'a Value, prop: &str, state: &str, level: f64) -> &'a Value {
    v["valuations"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| {
            r["proposition"] == prop && r["state"] == state && r["level"].as_f64() == Some(level)
        })
        .unwrap()
}

#[test]
fn valuate_qubit_tables() {
    let (code, v) = report("valuate", "qubit.json", &[]);
    assert_eq!(code, 0);
    let all = row(&v, "sz_up", "up", 1.0);
    assert_eq!(all["j_sheaf"]["Vz"], serde_json::json!(["bottom", "Vz"]));
    assert_eq!(all["j_sheaf"]["Vx"], serde_json::json!(["bottom", "Vx"]));
    assert_eq!(all["product"]["Vz"]["Vz"], "[0,1]");
    let half = row(&v, "sz_up", "plus_x", 1.0);
    assert_eq!(half["j_sheaf"]["Vz"], serde_json::json!(["bottom"]));
    assert_eq!(half["reduced"]["Vz"], serde_json::json!(["bottom"]));
    assert_eq!(half["product"]["Vz"]["Vz"], "[0,0.5]");
    for r in v["valuations"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["level"] == 0.0)
    {
        assert_eq!(r["presheaf"]["Vz"], serde_json::json!(["bottom", "Vz"]));
        assert_eq!(r["j_sheaf"]["Vx"], serde_json::json!(["bottom", "Vx"]));
    }
}

#[test]
fn probability_qubit() {
    let (code, v) = report("probability", "qubit.json", &[]);
    assert_eq!(code, 0);
    let find = |p: &str, s: &str| {
        v["probabilities"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["proposition"] == p && r["state"] == s)
            .unwrap()
            .clone()
    };
    let z = find("sz_up", "mixed");
    assert!((z["j_sheaf_min"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(z["exact"], true);
    let x = find("sx_up", "mixed");
    assert!((x["j_sheaf_min"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((x["born"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(x["exact"], false);
    assert!((find("sz_any", "plus_x")["j_sheaf_min"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn verify_qubit_reports_the_filter_failures() {
    let (code, v) = report("verify", "qubit.json", &[]);
    assert_eq!(code, 1);
    assert_eq!(
        failed_checks(&v),
        vec!["filter.rho_r", "filter.product", "filter.product_least"]
    );
}

#[test]
fn verify_eigenstates_only_passes() {
    let text = std::fs::read_to_string(config("qubit.json")).unwrap();
    let mut cfg: Value = serde_json::from_str(&text).unwrap();
    cfg["states"] = serde_json::json!([{"name": "up", "vector": [[1, 0], [0, 0]]}]);
    let f = temp_config(&cfg.to_string());
    let out = run(&["verify", "--config", f.path().to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(failed_checks(&v), Vec::<String>::new());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_bad_selector() {
    let (code, v) = report("verify", "bad_selector.json", &[]);
    assert_eq!(code, 1);
    assert_eq!(failed_checks(&v), vec!["selector.valid"]);
    let (code, _) = report("valuate", "bad_selector.json", &[]);
    assert_eq!(code, 2);
}

#[test]
fn low_guard_surfaces_enumeration_errors() {
    let (code, v) = report("verify", "qubit.json", &["--max-enum", "1"]);
    assert_eq!(code, 1);
    let checks = v["verification"]["checks"].as_array().unwrap();
    let too_large = |c: &&Value| {
        c["detail"]
            .to_string()
            .contains("exceeds the configured bound")
    };
    assert!(checks.iter().any(|c| too_large(&c)));
    assert!(checks
        .iter()
        .filter(|c| !too_large(c))
        .any(|c| c["passed"] == true));
    assert_eq!(v["max_enum"], 1);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let cfg = config("spin1.json");
    for (out, par) in [(&a, "false"), (&b, "true")] {
        let st = run(&[
            "valuate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--parallel",
            par,
        ]);
        assert_eq!(st.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
