//! End-to-end CLI tests: config ingestion, output formats, exit codes.

use std::io::Write;
use std::process::Command;

fn krein() -> Command {
    Command::new(env!("CARGO_BIN_EXE_krein"))
}

fn write_config(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("krein-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(body.as_bytes()).unwrap();
    path
}

const FLAT2: &str = r#"
schema_version = 1

[geometry]
kind = "flat"
dimension = 2

[model]
type = "nonrelativistic"
mass = 1.0
centers = [[0.0, 0.0]]
bindings = [1.0]

[task]
window = [-9.0, -0.01]
scan_points = 40
"#;

#[test]
fn spectrum_finds_flat_bound_state() {
    let cfg = write_config("flat2.toml", FLAT2);
    let out = krein().arg("--config").arg(&cfg).arg("spectrum").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let e = doc["results"]["bound_states"][0]["energy"].as_f64().unwrap();
    assert!((e + 1.0).abs() < 1e-8, "E_b = {e}");
}

#[test]
fn empty_window_exits_2() {
    let cfg = write_config(
        "flat2_empty.toml",
        &FLAT2.replace("window = [-9.0, -0.01]", "window = [-100.0, -2.0]"),
    );
    let out = krein().arg("--config").arg(&cfg).arg("spectrum").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_1_with_line_anchor() {
    let cfg = write_config("bad.toml", "schema_version = 1\n[geometry]\nkind = 3\n");
    let out = krein().arg("--config").arg(&cfg).arg("spectrum").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") || err.contains("kind"), "stderr: {err}");
}

#[test]
fn violated_check_exits_3() {
    // An impossible tolerance forces the violated verdict.
    let body = r#"
schema_version = 1

[geometry]
kind = "flat-torus"
lengths = [6.283185307179586, 6.283185307179586]

[model]
type = "nonrelativistic"
mass = 1.0
centers = [[0.9, 1.1], [4.2, 3.3]]
bindings = [1.0, 0.8]

[task]
energy_pairs = [[-3.0, -7.0]]
tolerance = 1e-30
basis_modes = 9
"#;
    let cfg = write_config("strict.toml", body);
    let out = krein()
        .arg("--config")
        .arg(&cfg)
        .arg("check-identity")
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn json_output_is_deterministic() {
    let cfg = write_config("det.toml", FLAT2);
    let a = krein().arg("--config").arg(&cfg).arg("spectrum").output().unwrap();
    let b = krein().arg("--config").arg(&cfg).arg("spectrum").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_format_emits_rows() {
    let cfg = write_config("csv.toml", FLAT2);
    let out = krein()
        .arg("--config")
        .arg(&cfg)
        .args(["--format", "csv", "spectrum"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("energy,"), "got: {text}");
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn plot_data_files_have_header_and_two_columns() {
    let plotdir = std::env::temp_dir().join("krein-cli-tests/plots");
    let _ = std::fs::remove_dir_all(&plotdir);
    let body = format!(
        r#"
schema_version = 1

[geometry]
kind = "flat-torus"
lengths = [6.283185307179586, 6.283185307179586]

[model]
type = "relativistic"
mass = 1.0
centers = [[1.0, 1.3]]
bindings = [0.5]

[output]
plot_data = true
plot_dir = "{}"
"#,
        plotdir.display()
    );
    let cfg = write_config("plot.toml", &body);
    let out = krein().arg("--config").arg(&cfg).arg("check-decay").output().unwrap();
    assert!(out.status.success());
    let entries: Vec<_> = std::fs::read_dir(&plotdir).unwrap().collect();
    assert!(!entries.is_empty());
    let text = std::fs::read_to_string(entries[0].as_ref().unwrap().path()).unwrap();
    assert!(text.starts_with('#'));
    let first_data = text.lines().nth(1).unwrap();
    assert_eq!(first_data.split_whitespace().count(), 2);
}

#[test]
fn lee_spectrum_reports_threshold_metadata() {
    let body = r#"
schema_version = 1

[geometry]
kind = "flat-torus"
lengths = [6.283185307179586, 6.283185307179586]

[model]
type = "lee"
mass = 1.0
binding = 0.5
coupling = 0.5
centers = [[1.0, 1.2]]
modes = 12
sector = 1
n_max = 2
"#;
    let cfg = write_config("lee.toml", body);
    let out = krein().arg("--config").arg(&cfg).arg("lee-spectrum").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let gs = doc["results"]["ground_state"].as_f64().unwrap();
    let th = doc["results"]["threshold"].as_f64().unwrap();
    assert!(gs < th && gs > th - 0.5);
    assert!(doc["results"]["ground_state_half_modes"].is_f64());
}

#[test]
fn resolvent_emits_kernel_values() {
    let body = r#"
schema_version = 1

[geometry]
kind = "flat"
dimension = 2

[model]
type = "nonrelativistic"
mass = 1.0
centers = [[0.0, 0.0]]
bindings = [1.0]

[task]
points = [[0.5, 0.3], [0.9, -0.5]]
energies = [-2.0, -5.0]
"#;
    let cfg = write_config("resolvent.toml", body);
    let out = krein().arg("--config").arg(&cfg).arg("resolvent").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = doc["results"]["kernel_values"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["value_re"].as_f64().unwrap() > 0.0);
    assert!(rows[0]["quadrature_tolerance"].is_f64());
}
