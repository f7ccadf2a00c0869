use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output, Stdio};
use torus_squeeze::barcode::Barcode;
use torus_squeeze::{CompletionTrace, DirectionSpec, EmbeddingCertificate, MapPoint};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torus-squeeze")).args(args).env_remove("TORUS_SQUEEZE_DIGITS").output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_torus-squeeze"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const REMARK_A: &str = r#"{"bars":[{"birth":"1/1","death":"2/1"},{"birth":"3/1","death":"4/1"}]}"#;
const REMARK_B: &str = r#"{"bars":[{"birth":"1/1","death":"4/1"},{"birth":"2/1","death":"3/1"}]}"#;

#[test]
fn embed_then_verify() {
    let out = run(&["embed", "--n", "2", "--direction", "golden", "--r", "100/1"]);
    assert_eq!(out.status.code(), Some(0));
    let cert: EmbeddingCertificate = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert.n, 2);
    let v = run_stdin(&["verify"], &out.stdout);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(json(&v), serde_json::json!({"accept": true}));
}

#[test]
fn tampered_certificate_is_rejected() {
    let out = run(&["embed", "--direction", "sqrt2", "--r", "7"]);
    let mut cert = json(&out);
    let row = cert["fiber_matrix"][0].as_array_mut().unwrap();
    for x in row.iter_mut() {
        let k: i64 = x.as_str().unwrap().parse().unwrap();
        *x = Value::String((2 * k).to_string());
    }
    let dir = tempdir();
    let path = dir.join("cert.json");
    std::fs::write(&path, cert.to_string()).unwrap();
    let v = run(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert_eq!(json(&v), serde_json::json!({"reject": "not-unimodular"}));
}

#[test]
fn bottleneck_on_remark_pair() {
    let out = run(&["bottleneck", "--a", REMARK_A, "--b", REMARK_B]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!({"distance": "3/2"}));
    let a: Barcode = serde_json::from_str(REMARK_A).unwrap();
    assert_eq!(a.len(), 2);
}

#[test]
fn spectrum_output() {
    let b = r#"{"bars":[{"birth":"5","death":"inf"},{"birth":"3","death":"inf"},{"birth":"4","death":"9"}]}"#;
    let out = json(&run(&["spectrum", "--in", b]));
    assert_eq!(out["min_marked_spectrum"], "3/1");
    assert_eq!(out["infinite"], 2);
    assert_eq!(out["endpoints"], serde_json::json!(["3/1", "4/1", "5/1", "9/1"]));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["embed", "--direction", "[\"3\",\"2\"]", "--r", "1"]).status.code(), Some(1));
    assert_eq!(run(&["embed", "--direction", "golden", "--r", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["embed", "--direction", "golden", "--r", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["embed", "--n", "3", "--direction", "golden", "--r", "1"]).status.code(), Some(2));
    let out = run(&["embed", "--direction", "golden", "--r", "1000", "--index-max", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let body = json(&out);
    assert_eq!(body["error"], "search-exhausted");
    assert_eq!(body["steps"], 3);
    assert!(body["best_admissible_r"].is_string());
}

#[test]
fn output_is_deterministic() {
    let args = ["embed", "--direction", "[\"1\",{\"a\":\"0\",\"b\":\"1\",\"d\":2},{\"a\":\"0\",\"b\":\"1\",\"d\":3}]", "--r", "10"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let cert: EmbeddingCertificate = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(cert.n, 3);
}

#[test]
fn approx_examples() {
    let out = json(&run(&["approx", "--direction", "golden", "--index-max", "4"]));
    let dir: DirectionSpec = serde_json::from_value(out["direction"].clone()).unwrap();
    assert_eq!(dir.n(), 2);
    let q: Vec<&str> = out["steps"].as_array().unwrap().iter().map(|s| s["q"].as_str().unwrap()).collect();
    assert_eq!(q, ["1", "1", "2", "3"]);
    let out = json(&run(&["approx", "--direction", "[\"1\",\"1/2\",\"1/3\"]", "--Q-max", "4"]));
    assert_eq!(out["steps"].as_array().unwrap().len(), 2);
    let rational = run(&["approx", "--direction", "[\"2\",\"3\"]"]);
    assert_eq!(rational.status.code(), Some(2));
    assert_eq!(json(&rational)["error"], "finite-expansion");
}

#[test]
fn complete_with_trace_flag() {
    let out = json(&run(&["complete", "--tuple", "[2,3,5]", "--trace"]));
    assert_eq!(out["bound"], "10");
    assert_eq!(out["p"], serde_json::json!(["2", "3", "5"]));
    let trace: CompletionTrace = serde_json::from_value(out["trace"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&trace.result).unwrap(), out["A"]);
    let out = json(&run(&["complete", "--tuple", "[3,2]"]));
    assert_eq!(out["A"], serde_json::json!([["1", "-2"], ["-1", "3"]]));
    assert_eq!(run(&["complete", "--tuple", "[2,4]"]).status.code(), Some(2));
}

#[test]
fn map_and_ortho_and_cat() {
    let cert = run(&["embed", "--direction", "golden", "--r", "3"]).stdout;
    let out = run_stdin(&["map", "--point", r#"{"base":["1/3","5/7"],"fiber":["0","1"]}"#], &cert);
    assert_eq!(out.status.code(), Some(0));
    let pt: MapPoint = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(pt.base.len(), 2);

    let out = json(&run(&["ortho", "--w", "[\"3\",\"4\"]", "--bound", "10"]));
    assert_eq!(out, serde_json::json!({"z": ["4", "-3"], "norm_sq": "25"}));
    let out = json(&run(&["ortho", "--w", "golden", "--bound", "100"]));
    assert!(out["z"].is_null());

    let out = json(&run(&["cat", "--n", "2", "--k", "1", "--r", "5"]));
    assert_eq!(out["unit_width_below_2"], true);
    let out = json(&run(&["cat", "--n", "3", "--k", "0", "--r", "1"]));
    let lam = &out["dominant_eigenvalue"];
    assert!(lam["lo"].as_str().unwrap().contains('/'));
}

#[test]
fn digits_environment_variable() {
    let out = Command::new(env!("CARGO_BIN_EXE_torus-squeeze"))
        .args(["approx", "--direction", "cat3-dominant", "--Q-max", "2"])
        .env("TORUS_SQUEEZE_DIGITS", "30")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let body = json(&out);
    let dir: DirectionSpec = serde_json::from_value(body["direction"].clone()).unwrap();
    let bits = dir.interval_bits().unwrap();
    assert!((90..130).contains(&bits), "{bits}");
    let bad = Command::new(env!("CARGO_BIN_EXE_torus-squeeze"))
        .args(["approx", "--direction", "golden"])
        .env("TORUS_SQUEEZE_DIGITS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("torus-squeeze-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
