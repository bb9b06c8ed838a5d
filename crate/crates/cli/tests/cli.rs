use std::process::Command;

use serde_json::Value;
use symbolkit::gamma::GammaMatrix;

fn symbolkit(args: &[&str]) -> (Value, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_symbolkit"))
        .args(args)
        .env_remove("SYMBOLKIT_N")
        .output()
        .expect("binary runs");
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (v, out.status.success())
}

#[test]
fn index_of_b3() {
    let (v, ok) = symbolkit(&["index", "B3"]);
    assert!(ok);
    assert_eq!(v["index"], -1);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["op"], "index");
}

#[test]
fn fredholm_identity() {
    let (v, ok) = symbolkit(&["fredholm", "I", "--phi-samples", "8", "--N", "32"]);
    assert!(ok);
    assert_eq!(v["verdict"], "fredholm");
}

#[test]
fn delta1_of_a2_uses_computed_signs() {
    let (v, ok) = symbolkit(&["delta1", "A2", "--N", "64"]);
    assert!(ok);
    assert_eq!((v["ind_minus"].as_i64(), v["ind_plus"].as_i64()), (Some(-1), Some(0)));
}

#[test]
fn errors_are_coded_and_fail() {
    let (v, ok) = symbolkit(&["mbar", "mult(e_k(1))"]);
    assert!(!ok);
    assert_eq!(v["error"]["code"], "not_in_commutative_algebra");
    let (v, ok) = symbolkit(&["sigma", "mult(nope)"]);
    assert!(!ok);
    assert_eq!(v["error"]["code"], "unknown_name");
}

#[test]
fn floats_are_strings() {
    let (v, _) = symbolkit(&["fredholm", "fmult(b)"]);
    assert_eq!(v["verdict"], "not_fredholm");
    assert!(v["config"]["tol_sigma"].is_string());
    assert!(v["config"]["N"].is_u64());
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sk.conf");
    std::fs::write(&cfg, "N = 20\nseed = 9\n").unwrap();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_symbolkit"));
        c.args(["homotopy", "--x-samples", "1", "--phi-points", "1", "--no-timing"]).args(extra);
        c.env_remove("SYMBOLKIT_N");
        if let Some(n) = env {
            c.env("SYMBOLKIT_N", n);
        }
        let v: Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        (v["config"]["N"].as_u64().unwrap(), v["config"]["seed"].as_u64().unwrap())
    };
    let conf = cfg.to_str().unwrap();
    assert_eq!(run(&[], Some("12")).0, 12);
    assert_eq!(run(&["--config", conf], Some("12")), (20, 9));
    assert_eq!(run(&["--config", conf, "--N", "24"], Some("12")), (24, 9));
}

#[test]
fn reports_are_deterministic() {
    let a = symbolkit(&["sigma", "A1", "--no-timing"]).0;
    let b = symbolkit(&["sigma", "A1", "--no-timing"]).0;
    assert_eq!(a, b);
    assert_eq!(a["k1_ae_coordinates"], serde_json::json!([1, 0, 0, 0]));
}

#[test]
fn csv_and_matrix_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let (v, ok) = symbolkit(&["mbar", "B3", "--csv", csv.to_str().unwrap()]);
    assert!(ok);
    assert_eq!(v["index"], -1);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("param,re,im\n"));
    let dump = dir.path().join("g.txt");
    let (_, ok) = symbolkit(&["gamma", "A1", "--N", "8", "--phi", "0.25", "--end", "-1", "--dump", dump.to_str().unwrap()]);
    assert!(ok);
    let g = GammaMatrix::from_text(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!((g.n, g.entries.nrows(), g.phi), (8, 17, 0.25));
}

#[test]
fn program_files_run_their_directives() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("p.sk");
    std::fs::write(&prog, "# bindings then commands\nP = B3 * B3\nindex P\nindex adj(B3)\nkcoords B1\n").unwrap();
    let (v, ok) = symbolkit(&["run", prog.to_str().unwrap(), "--no-timing"]);
    assert!(ok, "{v}");
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports[0]["index"], -2);
    assert_eq!(reports[1]["index"], 1);
    assert_eq!(reports[2]["coordinates"], serde_json::json!([1, 0, 0]));
}

#[test]
fn verify_exit_code_follows_the_suite() {
    let (v, ok) = symbolkit(&["verify", "crossed", "--no-timing"]);
    assert!(ok);
    assert_eq!(v["passed"], true);
    let (v, ok) = symbolkit(&["verify", "nonsense"]);
    assert!(!ok);
    assert_eq!(v["error"]["code"], "unknown_command");
}
