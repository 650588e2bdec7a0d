use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heliomech"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).expect("config should be written");
    path
}

fn run_config(dir: &TempDir, command: &str, config: &str, extra: &[&str]) -> Output {
    let path = write_config(dir, &format!("{command}.json"), config);
    let mut args = vec![command, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a checked-in file; `UPDATE_GOLDEN=1` rewrites it.
fn assert_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).expect("golden file should be written");
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

const DESK_HAMILTONIAN: &str =
    r#"{"schema": 1, "hamiltonian": {"uniform": {"g": 0.01, "optical": [100, 103], "acoustic": [3]}}}"#;

#[test]
fn material_matches_golden() {
    let o = run(&["material"]);
    assert!(o.status.success());
    assert_golden("material.json", &stdout(&o));
}

#[test]
fn desk_hamiltonian_matches_golden() {
    let dir = TempDir::new().unwrap();
    let o = run_config(&dir, "hamiltonian", DESK_HAMILTONIAN, &[]);
    assert_golden("hamiltonian_desk.json", &stdout(&o));
    let v = json(&o);
    let interaction: Vec<&Value> = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["process"] != "free")
        .collect();
    assert_eq!(interaction.len(), 8);
    assert!(interaction.iter().all(|t| t["coefficient"]["value"] == -0.01));
    assert!(v["hermitian_closure_violations"].as_array().unwrap().is_empty());
}

#[test]
fn reproduce_matches_golden_and_passes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("reproduce.json");
    let o = run(&["reproduce", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    for name in [
        "g1",
        "g2",
        "eps/eps0",
        "g'/g1 / 2pi",
        "g' / 2pi",
        "p/g'",
        "R2/R1 with printed prefactor",
    ] {
        let line = table
            .lines()
            .find(|l| l.starts_with(name))
            .unwrap_or_else(|| panic!("row {name} missing"));
        assert!(line.contains("PASS"), "{line}");
    }
    let text = fs::read_to_string(&out).unwrap();
    assert_golden("reproduce.json", &text);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["all_pass"], true);
}

#[test]
fn reproduce_exits_3_when_a_check_fails() {
    let dir = TempDir::new().unwrap();
    let o = run_config(&dir, "reproduce", r#"{"schema": 1, "fluid": {"alpha_m": 1.3e-7}}"#, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn rates_with_no_thermal_phonons_gives_zero_one_phonon_rate() {
    let dir = TempDir::new().unwrap();
    let v = json(&run_config(&dir, "rates", r#"{"schema": 1, "rates": {"mu1": 0}}"#, &[]));
    assert_eq!(v["one_phonon"]["value"]["value"], 0.0);
    assert_eq!(v["one_phonon"]["value"]["unit"], "rad/s");
    assert!(v["ratio_exact"].is_null());
}

#[test]
fn rates_report_the_stated_ratio_chain() {
    let v = json(&run(&["rates"]));
    assert_eq!(v["ratio_prefactor"]["value"], 2e-14);
    assert_eq!(v["ratio_paper_approx"]["value"]["value"], 0.2);
    assert_eq!(v["two_phonon_bare"]["bracket"]["pathways"].as_array().unwrap().len(), 4);
}

#[test]
fn detuning_sweep_csv_is_symmetric() {
    let o = run(&["sweep"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "detuning_rad_s,R1,R2_bare,R2_broadened,ratio");
    assert_eq!(lines.len(), 102);
    assert!(text.contains("\r\n"));
    let rows: Vec<Vec<f64>> = lines[1..]
        .iter()
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[50][0], 0.0);
    for i in 0..101 {
        let (a, b) = (rows[i][1], rows[100 - i][1]);
        assert!(((a - b) / a).abs() <= 1e-9, "row {i}: {a} vs {b}");
        assert_eq!(rows[i][0], -rows[100 - i][0]);
    }
    assert!(rows[50][1] > rows[0][1]);
}

#[test]
fn photon_number_sweep_has_its_own_header() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        &dir,
        "sweep",
        r#"{"schema": 1, "sweep": {"parameter": "n1", "values": [1, 10, 100]}}"#,
        &[],
    );
    let text = stdout(&o);
    assert!(text.starts_with("n1,R1,R2_bare,R2_broadened,ratio\r\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("rates.json");
    let first = run(&["rates"]).stdout;
    let second = run(&["rates"]).stdout;
    assert_eq!(first, second);
    assert!(run(&["rates", "--out", out.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(&out).unwrap(), first);
    let names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names.len(), 1, "temporary file left behind: {names:?}");
}

#[test]
fn precision_controls_significant_digits() {
    let dir = TempDir::new().unwrap();
    let v = json(&run_config(
        &dir,
        "material",
        r#"{"schema": 1, "output": {"precision": 3}}"#,
        &[],
    ));
    assert_eq!(v["coefficients"]["g1"]["value"], 0.0583);
}

#[test]
fn material_csv_lists_fields_with_units() {
    let text = stdout(&run(&["material", "--format", "csv"]));
    assert!(text.starts_with("field,value,unit\r\n"));
    assert!(text.contains("coefficients.g1,0.0583476938,1\r\n"));
    assert!(text.contains("fluid.rho0,145.1397,kg/m^3\r\n"));
}

#[test]
fn every_float_carries_a_unit() {
    fn check(v: &Value, path: &str) {
        match v {
            Value::Object(map) if map.contains_key("unit") => {
                assert!(map["unit"].is_string(), "{path}");
            }
            Value::Object(map) => map.iter().for_each(|(k, x)| check(x, &format!("{path}.{k}"))),
            Value::Array(items) => items.iter().for_each(|x| check(x, path)),
            Value::Number(n) => assert!(!n.is_f64() || path.ends_with("schema"), "bare float at {path}"),
            _ => {}
        }
    }
    for cmd in ["material", "coupling", "rates"] {
        check(&json(&run(&[cmd])), cmd);
    }
}

#[test]
fn coupling_reports_requested_elements() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"schema": 1, "coupling": {"linear": [[0, 0, 0]], "quadratic": [[0, 0, 0, 0]]}}"#;
    let v = json(&run_config(&dir, "coupling", config, &[]));
    assert_eq!(v["linear"].as_array().unwrap().len(), 1);
    let g = v["linear"][0]["value_over_2pi"]["value"].as_f64().unwrap();
    assert!((g / 1.8e3 - 1.0).abs() < 0.05, "{g}");
    let p = v["quadratic"][0]["value"]["value"].as_f64().unwrap();
    let g_rad = v["linear"][0]["value"]["value"].as_f64().unwrap();
    assert!((p / g_rad / 3.83e-12 - 1.0).abs() < 0.01);
}

#[test]
fn coupling_rejects_missing_elements() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        &dir,
        "coupling",
        r#"{"schema": 1, "coupling": {"linear": [[0, 0, 5]]}}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_first_order_checks_pass() {
    let dir = TempDir::new().unwrap();
    let v = json(&run_config(
        &dir,
        "oracle",
        r#"{"schema": 1, "oracle": {"checks": ["first-order", "scaling"]}}"#,
        &[],
    ));
    let summary = v["summary"].as_array().unwrap();
    assert_eq!(summary.len(), 5);
    assert!(summary.iter().all(|c| c["pass"] == true), "{summary:?}");
    assert!(v["second_order"].is_null());
}

#[test]
fn invalid_configurations_exit_1() {
    let dir = TempDir::new().unwrap();
    for (k, text) in [
        r#"{"schema": 1, "unknown": true}"#,
        r#"{"schema": 2}"#,
        r#"{}"#,
        r#"{"schema": 1, "rates": {"gamma": -1}}"#,
        r#"{"schema": 1, "modes": [{"kind": "optical", "family": "uniform", "V": 1e-14}]}"#,
        "not json",
    ]
    .iter()
    .enumerate()
    {
        let path = write_config(&dir, &format!("bad{k}.json"), text);
        let o = run(&["coupling", "--config", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(
        run(&["material", "--config", "/nonexistent.json"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["material", "--format", "xml"]).status.code(), Some(1));
}

#[test]
fn singular_denominator_exits_2() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        &dir,
        "rates",
        r#"{"schema": 1, "rates": {"preset": "desk-two-phonon", "omega2": 103}}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reproduce"));
}
