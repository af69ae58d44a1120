//! End-to-end behavior of the carleson-admit binary: report schema conformance,
//! the exit-code contract, CSV shapes, atomic output, and hand-checked values.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> (tempfile::TempDir, impl Fn(&str) -> PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    std::fs::write(
        root.join("mu.json"),
        r#"[{"re": 0.4, "im": 1.0, "weight": 0.3},
            {"re": 1.0, "im": 0.0, "weight": 1.0},
            {"re": 2.5, "im": -4.0, "weight": 0.6},
            {"re": 8.0, "im": 3.0, "weight": 2.0}]"#,
    )
    .unwrap();
    std::fs::write(
        root.join("two_atoms.json"),
        r#"[{"re": 1.0, "im": 0.0, "weight": 1.0},
            {"re": 1.0, "im": 10.0, "weight": 1.0}]"#,
    )
    .unwrap();
    std::fs::write(
        root.join("sys.json"),
        r#"{"q": 2.0, "modes": [
            {"lambda": [-1.0, 0.0], "b": [1.0, 0.0]},
            {"lambda": [-2.0, 3.0], "b": [1.5, 0.5]},
            {"lambda": [-4.0, -1.0], "b": [2.0, 0.0]},
            {"lambda": [-8.0, 0.0], "b": [2.5, -1.0]}]}"#,
    )
    .unwrap();
    std::fs::write(
        root.join("five_modes.json"),
        r#"{"q": 2.0, "modes": [
            {"lambda": [-1.0, 0.0], "b": [1.0, 0.0]},
            {"lambda": [-2.0, 0.0], "b": [1.0, 0.0]},
            {"lambda": [-4.0, 0.0], "b": [1.3333333333333333, 0.0]},
            {"lambda": [-8.0, 0.0], "b": [2.0, 0.0]},
            {"lambda": [-16.0, 0.0], "b": [3.2, 0.0]}]}"#,
    )
    .unwrap();
    std::fs::write(
        root.join("op.json"),
        r#"{"q": 2.0, "lambdas": [[-1.0, 0.0], [-3.0, 2.0]],
            "columns": [{"b": [[1.0, 0.0], [0.5, 0.0]]}, {"b": [[0.0, 1.0], [2.0, 0.0]]}]}"#,
    )
    .unwrap();
    std::fs::write(
        root.join("theta.json"),
        r#"{"system": {"q": 2.0, "modes": [{"lambda": [-1.0, 0.0], "b": [1.0, 0.0]},
                                           {"lambda": [-3.0, 1.0], "b": [0.0, 2.0]}]},
            "input": {"kind": "modulated", "a": 0.0, "b": 1.0, "freq": 2.0},
            "t0": 2.0}"#,
    )
    .unwrap();
    std::fs::write(
        root.join("theta_zero.json"),
        r#"{"system": {"q": 2.0, "modes": [{"lambda": [-1.0, 0.0], "b": [1.0, 0.0]}]},
            "input": {"kind": "grid", "a": 0.0, "b": 2.0,
                      "samples": [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]},
            "t0": 2.0}"#,
    )
    .unwrap();
    (dir, move |name: &str| root.join(name))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carleson-admit")).args(args).output().unwrap()
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is not valid JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process was killed by a signal")
}

/// Checks `doc` against the subset of JSON Schema the frozen schemas use:
/// type, enum, properties, required, additionalProperties, items,
/// minItems, maxItems. Appends a message per violation.
fn validate(schema: &Value, doc: &Value, at: &str, errors: &mut Vec<String>) {
    if let Some(ty) = schema.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => doc.is_object(),
            "array" => doc.is_array(),
            "string" => doc.is_string(),
            "number" => doc.is_number(),
            "integer" => doc.as_i64().is_some() || doc.as_u64().is_some(),
            "boolean" => doc.is_boolean(),
            "null" => doc.is_null(),
            other => {
                errors.push(format!("{at}: schema uses unknown type {other:?}"));
                return;
            }
        };
        if !ok {
            errors.push(format!("{at}: expected {ty}, got {doc}"));
            return;
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(doc) {
            errors.push(format!("{at}: {doc} is not one of {allowed:?}"));
        }
    }
    if let Some(obj) = doc.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for name in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(name) {
                    errors.push(format!("{at}: missing required property {name:?}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, value) in obj {
            if let Some(sub) = props.and_then(|p| p.get(key)) {
                validate(sub, value, &format!("{at}/{key}"), errors);
            } else {
                match schema.get("additionalProperties") {
                    Some(Value::Bool(false)) => {
                        errors.push(format!("{at}: unexpected property {key:?}"))
                    }
                    Some(sub) if sub.is_object() => {
                        validate(sub, value, &format!("{at}/{key}"), errors)
                    }
                    _ => {}
                }
            }
        }
    }
    if let Some(items) = doc.as_array() {
        let len = items.len() as u64;
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if len < min {
                errors.push(format!("{at}: {len} items, expected at least {min}"));
            }
        }
        if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
            if len > max {
                errors.push(format!("{at}: {len} items, expected at most {max}"));
            }
        }
        if let Some(sub) = schema.get("items") {
            for (i, item) in items.iter().enumerate() {
                validate(sub, item, &format!("{at}/{i}"), errors);
            }
        }
    }
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn conformance(schema_name: &str, doc: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    validate(&schema(schema_name), doc, "#", &mut errors);
    errors
}

#[test]
fn every_command_emits_a_schema_conformant_report() {
    let (_dir, path) = fixtures();
    let mu = path("mu.json");
    let sys = path("sys.json");
    let op = path("op.json");
    let theta = path("theta.json");
    fn arg(p: &PathBuf) -> &str {
        p.to_str().unwrap()
    }
    let sweeps: Vec<Vec<&str>> = vec![
        vec!["intensity", "--input", arg(&mu), "--alpha", "2"],
        vec![
            "embed-check", "--input", arg(&mu), "--q", "2", "--space", "lp", "--p", "2",
            "--budget", "6", "--seed", "5",
        ],
        vec!["finite-time", "--input", arg(&mu), "--q", "2", "--tau0", "1.5"],
        vec!["exp-orlicz", "--input", arg(&mu), "--alpha", "1"],
        vec!["admissible", "--input", arg(&sys), "--criterion", "phi-exp"],
        vec!["admissible", "--input", arg(&op), "--criterion", "linf"],
        vec!["witness-phi", "--input", arg(&sys)],
        vec!["theta", "--input", arg(&theta)],
        vec!["crosscheck", "--input", arg(&sys), "--budget", "4", "--seed", "11"],
        vec!["zero-class", "--input", arg(&mu), "--q", "2"],
    ];
    for args in &sweeps {
        let report = run_json(args);
        let errors = conformance("report.schema.json", &report);
        assert!(errors.is_empty(), "{args:?}: report violates the schema: {errors:?}");
    }
}

#[test]
fn input_schemas_accept_the_fixtures_and_reject_malformed_documents() {
    let (_dir, path) = fixtures();
    let mu: Value =
        serde_json::from_str(&std::fs::read_to_string(path("mu.json")).unwrap()).unwrap();
    assert!(conformance("discrete_measure.schema.json", &mu).is_empty());
    let sys: Value =
        serde_json::from_str(&std::fs::read_to_string(path("sys.json")).unwrap()).unwrap();
    assert!(conformance("diagonal_system.schema.json", &sys).is_empty());

    let missing_weight: Value = serde_json::json!([{ "re": 1.0, "im": 0.0 }]);
    assert!(!conformance("discrete_measure.schema.json", &missing_weight).is_empty());
    let stray_field: Value =
        serde_json::json!([{ "re": 1.0, "im": 0.0, "weight": 1.0, "phase": 0.5 }]);
    assert!(!conformance("discrete_measure.schema.json", &stray_field).is_empty());
    let not_an_array: Value = serde_json::json!({ "re": 1.0, "im": 0.0, "weight": 1.0 });
    assert!(!conformance("discrete_measure.schema.json", &not_an_array).is_empty());

    let bad_class: Value = serde_json::json!({
        "q": 2.0,
        "modes": [{ "lambda": [-1.0, 0.0], "b": [1.0, 0.0] }],
        "stability_class": "bounded"
    });
    assert!(!conformance("diagonal_system.schema.json", &bad_class).is_empty());
    let long_lambda: Value = serde_json::json!({
        "q": 2.0,
        "modes": [{ "lambda": [-1.0, 0.0, 3.0], "b": [1.0, 0.0] }]
    });
    assert!(!conformance("diagonal_system.schema.json", &long_lambda).is_empty());
}

#[test]
fn exit_codes_follow_the_contract() {
    let (_dir, path) = fixtures();
    let garbage = path("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    let out = run(&["intensity", "--input", garbage.to_str().unwrap(), "--alpha", "2"]);
    assert_eq!(exit_code(&out), 1, "malformed JSON should exit 1");

    let missing = path("nope.json");
    let out = run(&["intensity", "--input", missing.to_str().unwrap(), "--alpha", "2"]);
    assert_eq!(exit_code(&out), 1, "missing file should exit 1");

    let bad_atom = path("bad_atom.json");
    std::fs::write(&bad_atom, r#"[{"re": -1.0, "im": 0.0, "weight": 1.0}]"#).unwrap();
    let out = run(&["intensity", "--input", bad_atom.to_str().unwrap(), "--alpha", "2"]);
    assert_eq!(exit_code(&out), 2, "atom with re <= 0 should exit 2");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("re"), "stderr should name the offending field: {stderr}");

    let mu = path("mu.json");
    let out = run(&["embed-check", "--input", mu.to_str().unwrap(), "--q", "2", "--budget", "4"]);
    assert_eq!(exit_code(&out), 2, "budget without seed should exit 2");

    let sys = path("sys.json");
    let out =
        run(&["admissible", "--input", sys.to_str().unwrap(), "--criterion", "finite-time"]);
    assert_eq!(exit_code(&out), 2, "finite-time without --tau0 should exit 2");

    let theta = path("theta.json");
    let out = run(&["theta", "--input", theta.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(exit_code(&out), 1, "theta has no tabular form, csv should exit 1");

    let zero = path("theta_zero.json");
    let report = run_json(&["theta", "--input", zero.to_str().unwrap()]);
    assert_eq!(report["results"]["state"]["norm"].as_f64().unwrap(), 0.0);
}

#[test]
fn thread_cap_env_var_is_validated_and_does_not_change_output() {
    let (_dir, path) = fixtures();
    let mu = path("mu.json");
    let args =
        ["embed-check", "--input", mu.to_str().unwrap(), "--q", "2", "--budget", "10", "--seed", "42"];

    let bad = Command::new(env!("CARGO_BIN_EXE_carleson-admit"))
        .args(args)
        .env("CARLESON_ADMIT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(exit_code(&bad), 2, "non-numeric thread cap should exit 2");
    let zero = Command::new(env!("CARGO_BIN_EXE_carleson-admit"))
        .args(args)
        .env("CARLESON_ADMIT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(exit_code(&zero), 2, "zero thread cap should exit 2");

    let default = run(&args);
    let capped = Command::new(env!("CARGO_BIN_EXE_carleson-admit"))
        .args(args)
        .env("CARLESON_ADMIT_THREADS", "1")
        .output()
        .unwrap();
    assert!(default.status.success() && capped.status.success());
    assert_eq!(default.stdout, capped.stdout, "thread cap changed the report bytes");
}

fn csv_rows(out: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8(out.to_vec())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn csv_outputs_have_the_documented_shapes() {
    let (_dir, path) = fixtures();
    let mu = path("mu.json");
    let out = run(&["intensity", "--input", mu.to_str().unwrap(), "--alpha", "2", "--format", "csv"]);
    assert!(out.status.success());
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows[0], ["n", "intensity", "weighted", "cumulative"]);
    let body = &rows[1..];
    assert!(!body.is_empty());
    let ns: Vec<i32> = body.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(ns.windows(2).all(|w| w[0] < w[1]), "strip indices must ascend: {ns:?}");
    let mut running = 0.0;
    for row in body {
        let intensity: f64 = row[1].parse().unwrap();
        let weighted: f64 = row[2].parse().unwrap();
        let cumulative: f64 = row[3].parse().unwrap();
        assert_eq!(weighted, intensity, "unit weights leave the intensity unchanged");
        assert!(cumulative >= running, "cumulative column must be nondecreasing");
        running = cumulative;
    }

    let sys = path("five_modes.json");
    let out = run(&[
        "admissible", "--input", sys.to_str().unwrap(), "--criterion", "phi-exp",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows[0], ["n", "intensity", "weighted", "cumulative"]);
    for row in &rows[1..] {
        let n: f64 = row[0].parse().unwrap();
        let intensity: f64 = row[1].parse().unwrap();
        let weighted: f64 = row[2].parse().unwrap();
        assert!(
            (weighted - n * n * intensity).abs() <= 1e-15 * weighted.abs().max(1.0),
            "phi-exp weights are n^2: row {row:?}"
        );
    }

    let out = run(&[
        "embed-check", "--input", mu.to_str().unwrap(), "--q", "2", "--format", "csv",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows[0], ["n", "intensity", "exp_norm", "term", "cumulative"]);
    assert!(rows.len() > 1);

    let out = run(&["zero-class", "--input", mu.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows[0], ["tau", "bound"]);
    let taus: Vec<f64> = rows[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(taus, vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0], "default tau grid");
}

#[test]
fn output_files_are_written_without_leftover_temporaries() {
    let (_dir, path) = fixtures();
    let mu = path("mu.json");
    let dest = path("report.json");
    let out = run(&[
        "intensity", "--input", mu.to_str().unwrap(), "--alpha", "2",
        "--output", dest.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "with --output nothing goes to stdout");
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert!(conformance("report.schema.json", &written).is_empty());
    let leftovers: Vec<_> = std::fs::read_dir(dest.parent().unwrap())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|name| name.ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "temporary files left behind: {leftovers:?}");
}

#[test]
fn hand_checked_values_round_trip() {
    let (_dir, path) = fixtures();
    let two = path("two_atoms.json");
    let report = run_json(&["intensity", "--input", two.to_str().unwrap(), "--alpha", "2"]);
    let table = &report["results"]["intensity"];
    assert_eq!(table["total"].as_f64().unwrap(), 1.0);
    let entries = table["entries"].as_object().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries["0"].as_f64().unwrap(), 1.0);

    let five = path("five_modes.json");
    let report =
        run_json(&["admissible", "--input", five.to_str().unwrap(), "--criterion", "linf"]);
    let functional = report["results"]["report"]["functional_value"].as_f64().unwrap();
    let expected = (1..=5).map(|k| 1.0 / (k as f64 * k as f64)).sum::<f64>();
    assert!(
        (functional - expected).abs() <= 1e-12,
        "functional {functional} differs from Σ 1/k² = {expected}"
    );

    let report = run_json(&[
        "admissible", "--input", five.to_str().unwrap(), "--criterion", "linf",
        "--kappa-carleson", "64",
    ]);
    assert_eq!(report["constants_used"]["kappa_carleson"].as_f64().unwrap(), 64.0);
}
