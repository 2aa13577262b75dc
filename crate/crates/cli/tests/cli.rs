use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arithdyn"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_cfg(name: &str, args: &[&str]) -> Output {
    let path = config(name);
    let mut all = vec!["--config", path.to_str().unwrap(), "--reproducible"];
    all.extend_from_slice(args);
    run(&all)
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn temp_config(doc: &Value) -> tempfile::NamedTempFile {
    let f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    std::fs::write(f.path(), serde_json::to_vec(doc).unwrap()).unwrap();
    f
}

fn tweak(name: &str, f: impl FnOnce(&mut Value)) -> tempfile::NamedTempFile {
    let mut doc: Value = serde_json::from_slice(&std::fs::read(config(name)).unwrap()).unwrap();
    f(&mut doc);
    temp_config(&doc)
}

#[test]
fn lambda1_on_shipped_systems() {
    let v = json(&run_cfg("wehler_222", &["lambda1"]));
    let r = &v["report"];
    assert_eq!(r["char_poly"], serde_json::json!([1, -17, -17, 1]));
    assert_eq!(r["char_poly_factor"], serde_json::json!([1, -18, 1]));
    assert!(r["interval_width"].as_f64().unwrap() <= 1e-12);
    assert!(v.get("timestamp").is_none());

    let v = json(&run_cfg("power2", &["lambda1"]));
    assert_eq!(v["report"]["lambda1"]["lo"], "2");
    assert_eq!(v["report"]["lambda1"]["hi"], "2");

    let id = temp_config(&serde_json::json!({"system": {"type": "monomial", "matrix": [[1, 0], [0, 1]]}}));
    let v = json(&run(&["--config", id.path().to_str().unwrap(), "lambda1"]));
    assert_eq!(v["report"]["lambda1"]["lo"], "1");
    assert!(v["timestamp"].is_u64());
}

#[test]
fn print_config_shows_defaults() {
    let o = run(&["--print-config"]);
    let v = json(&o);
    let opts = &v["report"]["options"];
    for key in ["orbit_n", "tate_n", "window_radius", "eigen_digits", "log_digits", "cap_bits", "workers"] {
        assert!(opts[key].is_u64(), "{key} missing");
    }
    let v = json(&run(&["--print-config", "--precision", "20"]));
    assert_eq!(v["report"]["options"]["log_digits"], 20);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["lambda1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--config", "/nonexistent.json", "lambda1"]).status.code(), Some(2));
    assert_eq!(run_cfg("wehler_222", &["--format", "csv", "lambda1"]).status.code(), Some(2));
    let bad = temp_config(&serde_json::json!({"sytem": {}}));
    assert_eq!(run(&["--config", bad.path().to_str().unwrap(), "lambda1"]).status.code(), Some(2));

    let no_class = temp_config(&serde_json::json!({
        "system": {"type": "monomial", "matrix": [[2, 1], [1, 1]]},
        "points": [[[2, 1], [3, 1]]]
    }));
    assert_eq!(run(&["--config", no_class.path().to_str().unwrap(), "canh"]).status.code(), Some(3));

    let capped = tweak("wehler_222", |d| d["options"]["cap_bits"] = 300.into());
    let o = run(&["--config", capped.path().to_str().unwrap(), "orbit", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["report"]["stopped"].is_string() || v["report"]["stopped"].is_object());
}

#[test]
fn orbit_csv_and_inverse_steps() {
    let o = run_cfg("monomial_fib", &["--format", "csv", "orbit", "--steps", "4"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(&o.stdout[..]);
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[..3], ["n", "houses", "h_lo"]);
    assert_eq!(rdr.records().count(), 5);

    let v = json(&run_cfg("wehler_222", &["orbit", "--steps", "-2"]));
    let ns: Vec<i64> = v["report"]["rows"].as_array().unwrap().iter().map(|r| r["n"].as_i64().unwrap()).collect();
    assert_eq!(ns, [0, -1, -2]);
}

#[test]
fn ks_verify_verdicts() {
    let v = json(&run_cfg("wehler_222", &["ks-verify"]));
    assert_eq!(v["report"]["verdict"], "ExactMatch");
    let v = json(&run_cfg("monomial_fib", &["ks-verify"]));
    assert_eq!(v["report"]["verdict"], "EmpiricallyConsistent");
    let short = tweak("monomial_fib", |d| d["options"]["orbit_n"] = 1.into());
    let v = json(&run(&["--config", short.path().to_str().unwrap(), "ks-verify"]));
    assert_eq!(v["report"]["verdict"], "Inconclusive");
}

#[test]
fn sweep_periodic_on_power_map() {
    let v = json(&run_cfg("power2", &["sweep-periodic", "--bound", "1", "--max-period", "2"]));
    let r = &v["report"];
    assert_eq!(r["points_enumerated"], 13);
    let periodic = r["periodic"].as_array().unwrap();
    assert!(!periodic.is_empty());
    assert!(periodic.iter().all(|p| p["hhat_zero_within_error"] == true));
    let v = json(&run_cfg("power2", &["sweep-periodic", "--bound", "0"]));
    assert_eq!(v["report"]["points_enumerated"], 0);
    assert!(v["report"]["periodic"].as_array().unwrap().is_empty());
}

#[test]
fn bundle_analyze_from_args_and_config() {
    let v = json(&run(&["bundle", "analyze", "--n", "3", "--deg-g", "2", "--delta", "4", "--hn", "[(1,2),(2,0)]"]));
    let r = &v["report"];
    for key in ["action_matrix", "eigenvalues", "lambda1", "nef_generators", "dichotomy", "degree_check"] {
        assert!(r.get(key).is_some(), "{key} missing");
    }
    assert_eq!(r["degree_check"]["equal"], true);
    let v = json(&run_cfg("bundle_examples", &["bundle", "analyze"]));
    let all = v["report"].as_array().unwrap();
    assert_eq!(all.len(), 6);
    assert!(all.iter().all(|b| b["degree_check"]["equal"] == true && b["dichotomy"]["consistent"] == true));
    let o = run(&["bundle", "analyze", "--n", "2", "--deg-g", "1", "--delta", "1", "--hn", "[(1,0),(1,2)]"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lattice_and_chow_reports() {
    let v = json(&run_cfg("wehler_222", &["lattice"]));
    let r = &v["report"];
    assert_eq!(r["preserves_form"], true);
    assert_eq!(r["condition_a"]["holds"], true);
    assert_eq!(r["middle_index"]["ell"], 1);
    let v = json(&run_cfg("hk4_rank2", &["chow"]));
    assert_eq!(v["report"]["hyperbolic"], true);
    assert_eq!(v["report"]["isometry"]["preserves_form"], true);
}

#[test]
fn reproducible_runs_are_byte_identical() {
    for args in [&["ks-verify"][..], &["canh", "--n", "3", "--radius", "1"], &["lambda1"]] {
        let a = run_cfg("monomial_fib", args);
        let b = run_cfg("monomial_fib", args);
        assert!(a.status.success() || a.status.code() == Some(3));
        assert_eq!(a.stdout, b.stdout);
    }
    let a = run_cfg("power2", &["sweep-periodic"]);
    let b = run_cfg("power2", &["sweep-periodic"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run_cfg("power2", &["--out", out.to_str().unwrap(), "lambda1"]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "lambda1");
}
