use std::path::PathBuf;
use std::process::Command;

use orbindex_cli::{run_command, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["orbindex".to_string()];
    argv.extend(args.iter().map(|a| a.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn verify_e_z4_totals_agree() {
    let (code, out, err) = run(&["verify", &fixture("e_z4.json")]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let r = json(&out);
    assert_eq!(r["totals"]["kawasaki_exact"], "1");
    assert_eq!(r["totals"]["sum_of_localized_exact"], "1");
    assert_eq!(r["oracle"]["invariant_index"], 1);
    assert_eq!(r["verdicts"]["pass"], true);
}

#[test]
fn localized_r2_edge_is_a_quarter() {
    let (code, out, _) = run(&["localized", &fixture("p4.json"), "--class", "r2_edge"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(c(&json(&out)["rows"][0]["localized_index"]), (0.25, 0.0));
}

#[test]
fn heat_deviation_below_tolerance() {
    let (code, out, err) = run(&["heat", &fixture("p4.json"), "--class", "r2_edge", "--t", "0.05,0.1", "--tol", "1e-6"]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let r = json(&out);
    assert_eq!(r["rows"].as_array().unwrap().len(), 2);
    for row in r["rows"].as_array().unwrap() {
        let (re, im) = c(&row["heat_trace"]);
        assert!((re - 0.25).abs() < 1e-6 && im.abs() < 1e-6);
    }
    assert!(r["residuals"]["max_t_variation"].as_f64().unwrap() < 1e-6);
}

#[test]
fn unknown_label_lists_valid_labels() {
    let (code, out, err) = run(&["localized", &fixture("p4.json"), "--class", "rot5_5"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("r2_edge") && err.contains("rot1_4@0,0"), "{err}");
}

#[test]
fn exit_code_matrix() {
    let all = ["e_z4.json", "t2_z2.json", "s2_z3_o7.json", "p4.json", "p4_smooth.json", "p2.json", "torus_free.json"];
    for f in all {
        for cmd in ["classes", "sectors", "verify"] {
            let (code, _, err) = run(&[cmd, &fixture(f)]);
            assert_eq!(code, EXIT_PASS, "{cmd} {f}: {err}");
        }
        for m in ["kawasaki", "assembly"] {
            let (code, _, err) = run(&["index", &fixture(f), "--method", m]);
            assert_eq!(code, EXIT_PASS, "index {m} {f}: {err}");
        }
    }
    for f in ["e_z4.json", "t2_z2.json", "s2_z3_o7.json", "torus_free.json"] {
        assert_eq!(run(&["index", &fixture(f), "--method", "lefschetz"]).0, EXIT_PASS);
    }
    // input errors
    assert_eq!(run(&["index", &fixture("p4.json"), "--method", "lefschetz"]).0, EXIT_INPUT);
    assert_eq!(run(&["verify", &fixture("missing.json")]).0, EXIT_INPUT);
    assert_eq!(run(&["heat", &fixture("s2_z3_o7.json"), "--class", "e", "--t", "0.1"]).0, EXIT_INPUT);
    assert_eq!(run(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(run(&["heat", &fixture("p4.json"), "--class", "e"]).0, EXIT_INPUT);
    assert_eq!(run(&["--help"]).0, EXIT_PASS);
    // quadrature that cannot reach the tolerance
    let (code, _, err) = run(&[
        "heat", &fixture("p4.json"), "--class", "r_origin", "--t", "0.05", "--tol", "1e-14", "--grid", "4", "--max-grid", "8",
    ]);
    assert_eq!(code, EXIT_FAIL);
    assert!(err.contains("grid"), "{err}");
}

#[test]
fn bad_documents_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let base = std::fs::read_to_string(fixture("e_z4.json")).unwrap();
    let unknown = write("unknown.json", &base.replace("\"name\"", "\"title\""));
    let (code, _, err) = run(&["verify", &unknown]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line"), "{err}");
    let order5 = write("order5.json", &base.replace("[[0, -1], [1, 0]]", "[[0, -1], [1, 1]]"));
    assert_eq!(run(&["verify", &order5]).0, EXIT_INPUT);
    let broken = write("broken.json", "{ \"schema_version\": 1,");
    assert_eq!(run(&["classes", &broken]).0, EXIT_INPUT);
}

#[test]
fn reports_are_byte_identical() {
    for args in [vec!["verify", "p4.json"], vec!["verify", "p4_smooth.json"], vec!["sectors", "s2_z3_o7.json"]] {
        let f = fixture(args[1]);
        let a = run(&[args[0], &f]).1;
        let b = run(&[args[0], &f]).1;
        assert_eq!(a, b);
    }
}

#[test]
fn cutoff_kinds_differ_only_in_header_and_small_residuals() {
    let exact = json(&run(&["verify", &fixture("p4.json")]).1);
    let smooth = json(&run(&["verify", &fixture("p4_smooth.json")]).1);
    assert_ne!(exact["convention"], smooth["convention"]);
    let rows = |r: &Value| r["rows"].as_array().unwrap().clone();
    for (a, b) in rows(&exact).iter().zip(rows(&smooth).iter()) {
        assert_eq!(a["label"], b["label"]);
        let ((ar, ai), (br, bi)) = (c(&a["localized_index"]), c(&b["localized_index"]));
        assert!((ar - br).abs() < 1e-8 && (ai - bi).abs() < 1e-8, "{}", a["label"]);
    }
}

#[test]
fn free_action_has_identity_row_only() {
    let r = json(&run(&["verify", &fixture("torus_free.json")]).1);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["label"], "e");
}

#[test]
fn mode_override_from_environment() {
    let bin = env!("CARGO_BIN_EXE_orbindex");
    let out = Command::new(bin).args(["verify", &fixture("e_z4.json")]).env("ORBINDEX_MODE", "float").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    let r = json(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(r["convention"]["mode"], "float");
    assert!(r["totals"].get("kawasaki_exact").is_none());

    let out = Command::new(bin).args(["verify", &fixture("p4_smooth.json")]).env("ORBINDEX_MODE", "exact").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));

    let out = Command::new(bin).args(["verify", &fixture("e_z4.json")]).env("ORBINDEX_MODE", "quad").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));

    let out = Command::new(bin).args(["verify", &fixture("e_z4.json")]).env_remove("ORBINDEX_MODE").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PASS));
    assert_eq!(json(&String::from_utf8(out.stdout).unwrap())["convention"]["mode"], "exact");
}
