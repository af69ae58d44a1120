//! Report envelope, canonical JSON rendering, CSV tables, atomic output.
//!
//! Reports are rendered through a fixed-format printer rather than the
//! default serializer so that runs are reproducible byte for byte: object
//! keys arrive sorted (serde_json's map is a BTreeMap), every float is
//! printed with 17 significant digits (`{:.16e}`, enough to round-trip an
//! f64 exactly), and files are written next to their destination and
//! renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use admit_core::measure::{IntensityTable, StripWeights};

/// Envelope around every command's output.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: String,
    pub spec: Value,
    pub results: Value,
    pub constants_used: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(spec: Value, results: Value) -> Report {
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            spec,
            results,
            constants_used: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn render(&self) -> anyhow::Result<String> {
        let value = serde_json::to_value(self)?;
        let mut out = String::new();
        write_value(&mut out, &value, 0);
        out.push('\n');
        Ok(out)
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                out.push_str(&format_float(x));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                write_value(out, item, indent + 1);
            }
            newline(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent + 1);
                out.push_str(&serde_json::to_string(key).expect("key encodes"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
            }
            newline(out, indent);
            out.push('}');
        }
    }
}

fn newline(out: &mut String, indent: usize) {
    out.push('\n');
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Strip table as CSV: one row per strip, cumulative column running over
/// the weighted terms in strip order.
pub fn emit_strip_csv(table: &IntensityTable, weights: StripWeights) -> String {
    let mut out = String::from("n,intensity,weighted,cumulative\n");
    let mut cumulative = 0.0;
    for (&n, &c) in &table.entries {
        let weighted = weights.weight(n) * c;
        cumulative += weighted;
        out.push_str(&format!(
            "{n},{},{},{}\n",
            format_float(c),
            format_float(weighted),
            format_float(cumulative)
        ));
    }
    out
}

/// Two-column curve as CSV.
pub fn emit_curve_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for &(x, y) in rows {
        out.push_str(&format!("{},{}\n", format_float(x), format_float(y)));
    }
    out
}

/// Upper-bound term table as CSV.
pub fn emit_terms_csv(terms: &[admit_core::laplace::UpperBoundTerm]) -> String {
    let mut out = String::from("n,intensity,exp_norm,term,cumulative\n");
    let mut cumulative = 0.0;
    for t in terms {
        cumulative += t.term;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.n,
            format_float(t.intensity),
            format_float(t.exp_norm),
            format_float(t.term),
            format_float(cumulative)
        ));
    }
    out
}

/// Write to `path` atomically (sibling temp file, then rename), or to
/// stdout when no path is given.
pub fn write_output(path: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match path {
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let mut name = path
                .file_name()
                .ok_or_else(|| anyhow::anyhow!("output path {} has no file name", path.display()))?
                .to_os_string();
            name.push(".tmp");
            let tmp = path.with_file_name(name);
            fs::write(&tmp, contents)?;
            fs::rename(&tmp, path)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use admit_core::{AtomRecord, DiscreteMeasure};

    #[test]
    fn floats_round_trip_and_integers_stay_integers() {
        let value = serde_json::json!({
            "a": 0.1,
            "b": 11.313708498984761f64,
            "c": 7,
            "d": [1.0, -0.0],
        });
        let mut out = String::new();
        write_value(&mut out, &value, 0);
        assert!(out.contains("\"c\": 7"));
        assert!(out.contains("1.1313708498984761e1"));
        let back: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(back["a"].as_f64().unwrap(), 0.1);
        assert_eq!(back["b"].as_f64().unwrap(), 11.313708498984761);
        assert_eq!(back["c"].as_i64().unwrap(), 7);
    }

    #[test]
    fn strip_csv_accumulates_in_order() {
        let mu = DiscreteMeasure::from_records(&[
            AtomRecord { re: 1.0, im: 0.0, weight: 1.0 },
            AtomRecord { re: 4.0, im: 2.0, weight: 8.0 },
        ])
        .unwrap();
        let table = mu.intensity_table(2.0).unwrap();
        let csv = emit_strip_csv(&table, StripWeights::NSquared);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("n,"));
        assert!(lines[1].starts_with("0,"));
        assert!(lines[2].starts_with("2,"));
        let last: Vec<&str> = lines[2].split(',').collect();
        let weighted: f64 = last[2].parse().unwrap();
        assert!((weighted - 4.0 * 0.5).abs() < 1e-12);

        let empty = emit_strip_csv(
            &DiscreteMeasure::empty().intensity_table(2.0).unwrap(),
            StripWeights::Unit,
        );
        assert_eq!(empty, "n,intensity,weighted,cumulative\n");
    }
}
