//! End-to-end checks of the `csp-mimo` binary and its output files.

use std::path::{Path, PathBuf};
use std::process::Command;

use regex::Regex;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csp-mimo"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_ok(args: &[&str], config: &Path, out: &Path) {
    let output = bin().args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap();
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
}

fn read_csv(path: &Path) -> (String, Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap().to_string();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (comment, header, rows)
}

/// Subset of JSON Schema: type, enum, required, properties,
/// additionalProperties = false, minimum, items, pattern.
fn validate(schema: &Value, value: &Value, at: &str, errors: &mut Vec<String>) {
    if let Some(ty) = schema.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "integer" => value.is_u64() || value.is_i64(),
            "number" => value.is_number(),
            "boolean" => value.is_boolean(),
            _ => false,
        };
        if !ok {
            errors.push(format!("{at}: expected {ty}, got {value}"));
            return;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            errors.push(format!("{at}: {value} not in enum"));
        }
    }
    if let (Some(min), Some(v)) = (schema.get("minimum").and_then(Value::as_f64), value.as_f64()) {
        if v < min {
            errors.push(format!("{at}: {v} below minimum {min}"));
        }
    }
    if let (Some(pattern), Some(s)) = (schema.get("pattern").and_then(Value::as_str), value.as_str()) {
        if !Regex::new(pattern).unwrap().is_match(s) {
            errors.push(format!("{at}: {s:?} does not match {pattern}"));
        }
    }
    if let Some(obj) = value.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                errors.push(format!("{at}: missing {key}"));
            }
        }
        for (key, v) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => validate(sub, v, &format!("{at}.{key}"), errors),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{at}: unexpected key {key}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            validate(items, v, &format!("{at}[{i}]"), errors);
        }
    }
}

fn manifest_schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/manifest.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn noiseless_single_run_detects_the_true_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "single.conf", "snr_db = 40\nnoiseless = true\ncell = 30\n");
    run_ok(&["single-run"], &cfg, dir.path());
    let (comment, header, rows) = read_csv(&dir.path().join("single_run.csv"));
    assert!(comment.starts_with("# seed=1 schema="));
    assert_eq!(header, ["detected", "t_hat", "angle_deg", "statistic", "eta", "true_cell"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "true");
    assert_eq!(rows[0][1], "30");
    assert_eq!(rows[0][5], "30");
}

#[test]
fn roc_csv_has_declared_schema_and_numeric_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "roc.conf", "pfa_grid = [0.001, 0.01, 0.1]\n");
    let output = bin()
        .args(["roc", "--trials", "100", "--seed", "5", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    let (comment, header, rows) = read_csv(&dir.path().join("roc.csv"));
    assert_eq!(comment, "# seed=5 schema=1");
    assert_eq!(header, ["pfa", "pd_emp", "pd_theory", "stderr"]);
    assert_eq!(rows.len(), 3);
    let number = Regex::new(r"^-?[0-9]+(\.[0-9]+)?$").unwrap();
    for row in &rows {
        for cell in row {
            assert!(number.is_match(cell), "{cell}");
            let digits = cell.trim_start_matches('-').replace('.', "");
            assert!(digits.trim_start_matches('0').len() <= 9, "{cell}");
        }
        let pd: f64 = row[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&pd));
    }
}

#[test]
fn manifest_validates_against_shipped_schema() {
    let schema = manifest_schema();
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "est.conf", "q_grid = [1, 2]\n");
    let out = dir.path().join("est");
    let output = bin()
        .args(["estimate", "--trials", "20", "--threads", "2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let mut errors = Vec::new();
    validate(&schema, &manifest, "$", &mut errors);
    assert!(errors.is_empty(), "{errors:#?}");
    assert_eq!(manifest["threads"], 2);
    assert_eq!(manifest["outputs"][0], "estimate.csv");

    // the validator itself rejects a broken manifest
    let mut broken = manifest.clone();
    broken["seed"] = Value::from(-1);
    broken.as_object_mut().unwrap().remove("version");
    let mut errors = Vec::new();
    validate(&schema, &broken, "$", &mut errors);
    assert_eq!(errors.len(), 2, "{errors:#?}");
}

#[test]
fn manifest_config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.conf", "receivers = 6\ndelta_grid = 4:4:12\n");
    let first = dir.path().join("first");
    let output = bin()
        .args(["resolvability", "--trials", "30", "--seed", "3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&first)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(first.join("manifest.json")).unwrap()).unwrap();
    let echo = write_config(dir.path(), "echo.conf", manifest["config"].as_str().unwrap());
    let second = dir.path().join("second");
    let output = bin().arg("resolvability").arg("--config").arg(&echo).arg("--out").arg(&second).output().unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    assert_eq!(
        std::fs::read(first.join("resolvability.csv")).unwrap(),
        std::fs::read(second.join("resolvability.csv")).unwrap()
    );
}

#[test]
fn same_spec_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.conf", "mismatch = [0.5]\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_ok(&["mismatch", "--trials", "50"], &cfg, &a);
    run_ok(&["mismatch", "--trials", "50"], &cfg, &b);
    assert_eq!(std::fs::read(a.join("estimate.csv")).unwrap(), std::fs::read(b.join("estimate.csv")).unwrap());
}

#[test]
fn bad_config_fails_with_the_key_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.conf", "cr1 = 0\n");
    let output = bin().arg("roc").arg("--config").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("cr1"));

    let output = bin().args(["roc", "--threads", "0", "--config"]).arg(&cfg).output().unwrap();
    assert!(!output.status.success());
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "conf") {
            csp_mimo::cli::parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 6);
}
