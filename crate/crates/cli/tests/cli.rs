use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_stimpdc");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("STIMPDC_OUT_DIR").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn overlap_table_for_gaussian_pump() {
    let text = stdout(&["overlap", "--pump", "gauss", "--lmax", "3", "--waist", "1"]);
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["ell_signal", "ell_idler", "method", "value", "error", "closed_form", "quadrature", "status"]);
    assert_eq!(rows.len(), 8);
    let ells: Vec<i32> = rows[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ells, (-3..=3).collect::<Vec<_>>());
    let expected = (2.0 / std::f64::consts::PI).sqrt() * 4.0 / 9.0;
    let row = rows.iter().find(|r| r[0] == "1").unwrap();
    let value: f64 = row[3].parse().unwrap();
    assert!((value - expected).abs() < 1e-15);
    for r in &rows[1..] {
        let (cf, q): (f64, f64) = (r[5].parse().unwrap(), r[6].parse().unwrap());
        assert!((cf - q).abs() <= 1e-8 * cf.abs());
        assert_eq!(r[7], "ok");
    }
}

#[test]
fn overlap_single_row_and_quadrature_only_pump() {
    let rows = csv_rows(&stdout(&["overlap", "--lmax", "0"]));
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][..3], ["0", "0", "closed_form"]);
    let rows = csv_rows(&stdout(&["overlap", "--pump", "lg:1:2", "--lmax", "2"]));
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|r| r[2] == "quadrature" && r[5].is_empty() && r[7] == "ok"));
    let idlers: Vec<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(idlers, ["4", "3", "2", "1", "0"]);
}

#[test]
fn spectrum_ratio_and_flat_mlg() {
    let rows = csv_rows(&stdout(&["spectrum", "--lmax", "4"]));
    assert_eq!(rows[0], ["ell_signal", "ell_idler", "weight", "normalized"]);
    let w: Vec<f64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    for i in 4..8 {
        assert!((w[i + 1] / w[i] - 4.0 / 9.0).abs() < 1e-10);
    }
    let total: f64 = rows[1..].iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-14);

    let rows = csv_rows(&stdout(&["spectrum", "--basis", "mlg", "--l", "1", "--lmax", "3"]));
    let first = &rows[1][2];
    assert!(rows[1..].iter().all(|r| &r[2] == first));
}

#[test]
fn empty_window_is_rejected() {
    let out = run(&["spectrum", "--lmax", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ell_max"));
}

#[test]
fn clone_rows() {
    let rows = csv_rows(&stdout(&["clone", "-n", "1", "-m", "2", "-d", "2"]));
    assert_eq!(rows[0], ["N", "M", "d", "F_state", "F_counting", "F_formula", "verdict", "warning"]);
    assert_eq!(rows[1], ["1", "2", "2", "5/6", "5/6", "5/6", "exact-equal", ""]);
    let rows = csv_rows(&stdout(&["clone", "-n", "3", "-m", "3", "-d", "6"]));
    assert_eq!(&rows[1][3..7], ["1", "1", "1", "exact-equal"]);
}

#[test]
fn clone_grid_is_exact_equal() {
    let rows = csv_rows(&stdout(&["clone", "--grid", "--n-max", "3", "--m-max", "5", "--dims", "2,4"]));
    assert_eq!(rows.len(), 1 + 2 * (5 + 4 + 3));
    assert!(rows[1..].iter().all(|r| r[6] == "exact-equal"));
}

#[test]
fn clone_float_mode_and_exact_limit() {
    let rows = csv_rows(&stdout(&["clone", "-n", "2", "-m", "5", "-d", "4", "--arithmetic", "float"]));
    assert_eq!(rows[1][6], "float-agree");
    assert!(!rows[1][7].is_empty());
    let f: f64 = rows[1][3].parse().unwrap();
    assert!((f - 0.7).abs() < 1e-12);
    // C(40 + 19, 19) distributions is far past the exact limit
    let out = run(&["clone", "-n", "1", "-m", "41", "-d", "20", "--arithmetic", "exact"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn state_listing() {
    let text = stdout(&["state", "-n", "1", "-q", "1", "-d", "2"]);
    assert_eq!(
        text,
        "configuration,amplitude\ns(-1)=1 s(+1)=1 i(+1)=1,(1/3)·sqrt(3)\ns(+1)=2 i(-1)=1,(1/3)·sqrt(6)\n"
    );
    assert_eq!(stdout(&["state", "-n", "1", "-q", "0"]), "configuration,amplitude\ns(+1)=1,(1/1)·sqrt(1)\n");
    let float = csv_rows(&stdout(&["state", "-n", "1", "-q", "1", "-d", "2", "--arithmetic", "float"]));
    assert_eq!(float[0], ["configuration", "amplitude_re", "amplitude_im"]);
    let a: f64 = float[2][1].parse().unwrap();
    assert!((a - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
}

#[test]
fn state_rejects_target_outside_window() {
    let out = run(&["state", "-n", "1", "-q", "1", "-d", "2", "--target", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["state", "-d", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flatten_strategies() {
    let rows = csv_rows(&stdout(&["flatten", "--strategy", "procrustean", "--lmax", "2"]));
    let r = 2.0f64 / 3.0;
    let expected = 4.0 * r.powi(6) / (2.0 * r.powi(4) + 2.0 * r.powi(6));
    let p: f64 = rows[1][4].parse().unwrap();
    assert!((p - expected).abs() < 1e-12);
    let rows = csv_rows(&stdout(&["flatten", "--strategy", "mlg", "--l", "2", "--lmax", "3"]));
    assert!(rows[1..].iter().all(|r| r[3] == "1.0000000000000000e0"));
    let half = std::f64::consts::FRAC_1_SQRT_2.to_string();
    let c0 = format!("0:0:{half}");
    let c2 = format!("0:2:{half}");
    let rows = csv_rows(&stdout(&["flatten", "--strategy", "pump", "--lmax", "2", "--component", &c0, "--component", &c2]));
    assert!(rows[1..].iter().all(|r| {
        let s: i32 = r[0].parse::<i32>().unwrap() + r[1].parse::<i32>().unwrap();
        s == 0 || s == 2
    }));
    let out = run(&["flatten", "--strategy", "pump", "--component", "0:0:0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["overlap", "--pump", "lg:1:1", "--lmax", "3", "--format", "json"];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["clone", "--grid", "--n-max", "2", "--m-max", "4", "--dims", "2,4"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn config_file_and_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "waist = 2.0\nformat = \"json\"\nlmax = 1\n").unwrap();
    let out_dir = dir.path().join("out");
    let status = Command::new(BIN)
        .args(["overlap", "--config", config.to_str().unwrap()])
        .env("STIMPDC_OUT_DIR", &out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let written = std::fs::read_to_string(out_dir.join("overlap.json")).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    // waist 2 halves the coefficient
    let v = rows[1]["value"].as_f64().unwrap();
    assert!((v - (2.0 / std::f64::consts::PI).sqrt() / 3.0).abs() < 1e-15);

    // a flag overrides the file
    let explicit = dir.path().join("explicit.csv");
    let status = Command::new(BIN)
        .args(["overlap", "--config", config.to_str().unwrap(), "--format", "csv", "--waist", "1"])
        .args(["--out", explicit.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&explicit).unwrap();
    assert!(text.starts_with("ell_signal,"));
    assert!(text.contains("0,0,closed_form,5.3192304053524353e-1"));
    assert!(!Path::new(&out_dir.join("overlap.csv")).exists());
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "tol = -1.0\n").unwrap();
    let out = run(&["clone", "-n", "1", "-m", "2", "-d", "2", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
