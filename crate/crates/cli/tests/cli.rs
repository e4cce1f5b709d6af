use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn setrap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setrap")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = setrap(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "setrap/1");
    v
}

fn csv(args: &[&str]) -> Vec<Vec<String>> {
    let out = setrap(&[args, &["--format", "csv"]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn params_reports_scaling_constants() {
    let v = json(&["params", "-c", &data("example_params.json")]);
    assert!((v["q0"].as_f64().unwrap() - 0.98).abs() < 0.005);
    assert!((v["u0_ev"].as_f64().unwrap() - 6.1).abs() < 0.05);
}

#[test]
fn ring_sweep_has_header_and_one_row_per_step() {
    let rows = csv(&["ring", "sweep", "--steps", "3", "--grid", "40"]);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], ["theta", "R1_um", "R2_um", "qz", "secular_hz", "depth_mev"]);
    assert!(rows[1..].iter().all(|r| r.len() == 6 && r[5].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn table_an_matches_reference_values() {
    let rows = csv(&["multipole", "table-an", "--max-n", "4"]);
    assert_eq!(rows[0], ["n", "u_bar", "minus_u_bar_over_n", "a_n"]);
    let want = [(1.02909, 0.236068), (1.03742, -0.266149), (1.04044, 0.276076)];
    assert_eq!(rows.len(), 4);
    for (r, (ratio, a)) in rows[1..].iter().zip(want) {
        assert!((r[2].parse::<f64>().unwrap() - ratio).abs() <= 1e-5, "{r:?}");
        assert!((r[3].parse::<f64>().unwrap() - a).abs() <= 1e-5, "{r:?}");
    }
}

#[test]
fn cli_numbers_come_straight_from_the_library() {
    let v = json(&["multipole", "depth", "-n", "2", "--theta0", "45", "--theta-w", "90", "--deg"]);
    let p = setrap::TrapParams::reference();
    let lib = setrap::depth::intrinsic_depth(2, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, &p).unwrap();
    let mev = lib.depth / setrap::units::ELEMENTARY_CHARGE * 1e3;
    assert!((v["depth_mev"].as_f64().unwrap() - mev).abs() < 1e-8 * mev);
    assert_eq!(v["estimates"].as_array().unwrap().len(), lib.saddle.estimate_chain.len());
    assert_eq!(v["optimal"]["satisfied"], true);
    for key in ["u_saddle", "p_saddle_um", "crude_mev"] {
        assert!(!v[key].is_null(), "{key}");
    }
}

#[test]
fn bias_opt_fields() {
    let v = json(&["multipole", "bias-opt", "-n", "2", "--theta0", "100", "--theta-w", "90", "--deg", "--grid", "128"]);
    for key in ["vc_opt", "depth_ratio", "a_over_q2", "bias_voltage_v"] {
        assert!(v[key].is_number(), "{key}");
    }
    assert!(v["stable"].is_boolean());
}

#[test]
fn exit_codes() {
    assert_eq!(setrap(&["params"]).status.code(), Some(0));
    // unknown subcommand: usage error with help text
    let out = setrap(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Commands:"));
    assert_eq!(setrap(&["params", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(setrap(&["params", "-c", "/nonexistent/params.json"]).status.code(), Some(1));
    // θ outside (0, π/6)
    assert_eq!(setrap(&["ring", "design", "--theta", "1.0"]).status.code(), Some(2));
    // strips overlap
    assert_eq!(setrap(&["multipole", "strength", "-n", "3", "--theta0", "0", "--theta-w", "3"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |f: &str| {
        vec![
            "multipole".to_string(),
            "ueff-contours".into(),
            "-n".into(),
            "3".into(),
            "--theta0".into(),
            "0.2".into(),
            "--theta-w".into(),
            "1.0".into(),
            "--vc".into(),
            "0.05".into(),
            "--grid".into(),
            "48".into(),
            "--format".into(),
            "csv".into(),
            "-o".into(),
            dir.path().join(f).to_string_lossy().into_owned(),
        ]
    };
    for f in ["a.csv", "b.csv"] {
        let a = args(f);
        let out = setrap(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with(b"c_re,c_im,ueff_over_u0\n"));
}

#[test]
fn geometry_commands() {
    let g = data("sample_geometry.json");
    let rows = csv(&["field", "eval", "-g", &g, "--at", "0,0,100", "--at", "20,-10,50"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][3], "potential_v");
    let v = json(&["fourier", "grid", "-g", &g, "--region", "2", "--nx", "3", "--ny", "3"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    // centre sample is k = 0: voltage × area, −2 V × 80 µm × 40 µm
    assert!((rows[4]["re_v_um2"].as_f64().unwrap() + 6400.0).abs() < 1e-6);
    // a disk is not a polygon
    assert_eq!(setrap(&["fourier", "grid", "-g", &g, "--region", "3"]).status.code(), Some(2));
}
