use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn thetaflex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetaflex")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let out = thetaflex(&a);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(args: &[&str]) -> i32 {
    thetaflex(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const DIAG_I: &str = r#"{"re": [[0,0,0],[0,0,0],[0,0,0]], "im": [[1,0,0],[0,1,0],[0,0,1]]}"#;
const GENERIC: &str = r#"{"re": [[0.1,0.1,0.1],[0.1,0.1,0.1],[0.1,0.1,0.1]], "im": [[1,0,0],[0,1,0],[0,0,1]]}"#;

fn rational(v: &Value) -> (i64, i64) {
    (v["num"].as_i64().unwrap(), v["den"].as_i64().unwrap())
}

#[test]
fn theta_constant_at_i_identity() {
    let dir = tempfile::tempdir().unwrap();
    let tau = write(dir.path(), "tau.json", DIAG_I);
    let r = json(&["theta", "--char", "00", "--tau", &tau]);
    let v = &r["result"]["value"];
    // ϑ(0; i)³ with ϑ(0; i) = π^{1/4}/Γ(3/4)
    let want = 1.086_434_811_213_308_f64.powi(3);
    assert!((v["re"].as_f64().unwrap() - want).abs() < 1e-10);
    assert!(v["err"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["config"]["seed"], 0);
}

#[test]
fn odd_theta_constant_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    let tau = write(dir.path(), "tau.json", GENERIC);
    let r = json(&["theta", "--char", "77", "--tau", &tau]);
    let v = &r["result"]["value"];
    let norm = v["re"].as_f64().unwrap().hypot(v["im"].as_f64().unwrap());
    assert!(norm <= v["err"].as_f64().unwrap().max(1e-15));
    assert_eq!(r["result"]["gradient"]["components"].as_array().unwrap().len(), 3);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"re": [[0]]"#);
    let tau = write(dir.path(), "tau.json", DIAG_I);
    assert_eq!(code(&["theta", "--char", "00", "--tau", &bad]), 2);
    assert_eq!(code(&["theta", "--char", "08", "--tau", &tau]), 2);
    assert_eq!(code(&["theta", "--char", "00", "--tau", &tau, "--tol", "-1"]), 2);
    assert_eq!(code(&["orbits", "--boundary", "00"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn hyperelliptic_tau_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let tau = write(dir.path(), "tau.json", DIAG_I);
    assert_eq!(code(&["catalecticant", "--tau", &tau]), 3);
}

#[test]
fn orbit_counts() {
    let c = &json(&["orbits"])["result"]["counts"];
    assert_eq!((c["odd"].as_u64(), c["even"].as_u64()), (Some(28), Some(36)));
    assert_eq!(c["boundary_split"], serde_json::json!([16, 12]));
    assert_eq!(c["subspace_split"], serde_json::json!([18, 10]));
    let r = json(&["orbits", "--boundary", "06", "--subspace", "40,04"]);
    assert_eq!(r["result"]["counts"]["boundary_split"], serde_json::json!([16, 12]));
    assert_eq!(r["result"]["group_order"], 1451520);
}

#[test]
fn default_hyperflex_run_finds_a_hyperflex() {
    let r = json(&["hyperflex", "--verify-psi"]);
    let res = &r["result"];
    assert_eq!(res["is_hyperflex"], true);
    assert!(res["at_root"]["tangency_distance"].as_f64().unwrap() < 1e-4);
    assert_eq!(res["nearby"]["verdict"], "bitangent-only");
    let p = &res["psi_check"];
    assert_eq!(p["corrected_identity_holds"], true);
    assert!((p["corrected_ratio"][0].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn bracket_without_root_exits_4() {
    assert_eq!(code(&["hyperflex", "--bracket", "0,0.01"]), 4);
}

#[test]
fn classes_report() {
    let r = json(&["classes", "--show-exponents", "--clebsch"]);
    let h = &r["result"]["hyperflex"]["class"];
    assert_eq!((rational(&h["lambda"]), rational(&h["delta0"]), rational(&h["delta1"])), ((308, 1), (-32, 1), (-76, 1)));
    assert_eq!(r["result"]["hyperflex"]["abelian_display"], "308·L − 32·D");
    let e = &r["result"]["exponents"];
    assert_eq!(rational(&e["d0"]), (5, 4));
    assert_eq!(rational(&e["d1"]), (1, 1));
    assert_eq!(rational(&e["p1"]), (2, 1));
    assert_eq!(rational(&e["p3"]), (4, 1));
    let c = &r["result"]["clebsch"]["class"];
    assert_eq!((rational(&c["lambda"]), rational(&c["delta0"]), rational(&c["delta1"])), ((56, 1), (-6, 1), (-16, 1)));
}

#[test]
fn banana_slopes_and_coarse_grid() {
    let r = json(&["banana"]);
    let d = r["result"]["report"]["omega_diagonal"]["slope"].as_f64().unwrap();
    assert!((d - 3.5).abs() <= 0.1, "{d}");
    let s = r["result"]["report"]["omega_s1"]["slope"].as_f64().unwrap();
    assert!((s - 1.25).abs() <= 0.05, "{s}");
    assert_eq!(code(&["banana", "--points", "2"]), 5);
}

#[test]
fn clebsch_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let fermat = write(
        dir.path(),
        "fermat.json",
        r#"[{"exponents": [4,0,0], "re": 1}, {"exponents": [0,4,0], "re": 1}, {"exponents": [0,0,4], "re": 1}]"#,
    );
    let r = json(&["catalecticant", "--quartic", &fermat]);
    assert_eq!(r["result"]["verdict"]["is_clebsch"], true);
    assert_eq!(r["result"]["verdict"]["rank"], 3);
    let tau = write(dir.path(), "tau.json", GENERIC);
    let r = json(&["catalecticant", "--tau", &tau]);
    assert_eq!(r["result"]["verdict"]["is_clebsch"], false);
}

#[test]
fn json_reports_are_deterministic() {
    for args in [&["hyperflex", "--seed", "3", "--json"][..], &["classes", "--show-exponents", "--json"], &["banana", "--json"]] {
        let a = thetaflex(args);
        let b = thetaflex(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
