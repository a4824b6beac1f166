use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sparse_sar::io::{load_scene, read_json_file};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-sar")).args(args).output().unwrap()
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.in.json");
    fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn zero_scene_reconstructs_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scene": {"generator": "zero"}, "sampling": {"snr_db": null}}"#);
    let sim = dir.path().join("sim");
    let out = cli(&["simulate", "--config", &cfg, "--out", &s(&sim)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = dir.path().join("rec");
    let out = cli(&[
        "reconstruct", "--config", &cfg, "--out", &s(&rec),
        "--echo", &s(&sim.join("echo")), "--truth", &s(&sim.join("scene")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let image = load_scene(&rec.join("image")).unwrap();
    assert!(image.reflectivity.iter().all(|z| z.norm() == 0.0));
    let metrics = fs::read_to_string(rec.join("metrics.csv")).unwrap();
    let row: Vec<&str> = metrics.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0].parse::<f64>().unwrap(), 0.0);
    for f in ["image.pgm", "trace.csv", "config.json", "manifest.json"] {
        assert!(rec.join(f).exists(), "{f}");
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"eval": {"trials": 2, "sparsities": [0.03, 0.5]}}"#);
    let mut manifests = Vec::new();
    for threads in ["1", "2"] {
        let out_dir = dir.path().join(format!("t{threads}"));
        let out = cli(&["analyze", "sparsity", "--config", &cfg, "--seed", "4", "--threads", threads, "--out", &s(&out_dir)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        manifests.push(fs::read(out_dir.join("manifest.json")).unwrap());
        assert_eq!(
            fs::read(out_dir.join("sparsity.csv")).unwrap(),
            fs::read(dir.path().join("t1/sparsity.csv")).unwrap()
        );
    }
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn out_of_range_alpha_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"sampling": {"alpha": 1.5}}"#);
    let out = cli(&["simulate", "--config", &cfg, "--out", &s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampling.alpha"));
}

#[test]
fn missing_echo_sidecar_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert!(cli(&["simulate", "--out", &s(&sim)]).status.success());
    fs::remove_file(sim.join("echo.mask")).unwrap();
    let out = cli(&["reconstruct", "--echo", &s(&sim.join("echo")), "--out", &s(&dir.path().join("rec"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_arguments_and_fields_are_rejected() {
    assert_eq!(cli(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"sampling": {"ratoi": 0.5}}"#);
    let out = cli(&["simulate", "--config", &cfg, "--out", &s(&dir.path().join("o"))]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn phase_diagram_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"eval": {"trials": 1, "phase_diagram": {"sparsities": [0.01, 0.1], "ratios": [0.5, 1.0], "snrs_db": [null]}}}"#,
    );
    let out_dir = dir.path().join("pd");
    let out = cli(&["phase-diagram", "--config", &cfg, "--out", &s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("phase_diagram.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    let json: serde_json::Value = read_json_file(&out_dir.join("phase_diagram.json")).unwrap();
    assert_eq!(json["successes"].as_array().unwrap().len(), 4);
}
