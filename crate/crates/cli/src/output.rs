//! Deterministic JSON and CSV rendering.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::CliError;

/// A number with its unit, `{"unit": ..., "value": ...}`.
pub fn q(value: f64, unit: &str) -> Value {
    json!({ "value": value, "unit": unit })
}

/// Rounds to `digits` significant digits through the decimal form, so the
/// shortest round-trip representation printed afterwards is stable.
pub fn round_sig(value: f64, digits: usize) -> f64 {
    if !value.is_finite() || value == 0.0 {
        return value;
    }
    format!("{:.*e}", digits.saturating_sub(1), value)
        .parse()
        .unwrap_or(value)
}

/// Rounds every float in the tree.
pub fn round_tree(value: &mut Value, digits: usize) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().unwrap_or(f64::NAN), digits);
            *value = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(|v| round_tree(v, digits)),
        Value::Object(map) => map.values_mut().for_each(|v| round_tree(v, digits)),
        _ => {}
    }
}

pub fn format_number(value: f64, digits: usize) -> String {
    let r = round_sig(value, digits);
    if r.is_nan() {
        "NaN".into()
    } else if r.is_infinite() {
        if r > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        Value::from(r).to_string()
    }
}

/// Header and rows of a CSV table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header).map_err(io_error)?;
        for row in &self.rows {
            w.write_record(row).map_err(io_error)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

fn io_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// `field,value,unit` rows for every leaf of a JSON tree; `{value, unit}`
/// pairs collapse into one row.
pub fn flatten(value: &Value) -> Table {
    let mut table = Table::new(&["field", "value", "unit"]);
    flatten_into(value, String::new(), &mut table);
    table
}

fn flatten_into(value: &Value, path: String, table: &mut Table) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match value {
        Value::Object(map) if is_quantity(map) => {
            table
                .rows
                .push(vec![path.clone(), scalar(&map["value"]), scalar(&map["unit"])]);
        }
        Value::Object(map) => {
            for (k, v) in map {
                flatten_into(v, join(k), table);
            }
        }
        Value::Array(items) => {
            for (k, v) in items.iter().enumerate() {
                flatten_into(v, join(&k.to_string()), table);
            }
        }
        leaf => table.rows.push(vec![path, scalar(leaf), String::new()]),
    }
}

fn is_quantity(map: &Map<String, Value>) -> bool {
    map.len() == 2 && map.contains_key("value") && map.get("unit").is_some_and(Value::is_string)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn to_json(value: &Value) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_requested_digits() {
        assert_eq!(round_sig(0.058347693214, 9), 0.0583476932);
        assert_eq!(round_sig(-1.23456789012e-30, 3), -1.23e-30);
        assert_eq!(round_sig(0.0, 9), 0.0);
        assert!(round_sig(f64::NAN, 9).is_nan());
    }

    #[test]
    fn quantities_flatten_to_one_row() {
        let v = json!({"a": q(1.5, "rad/s"), "b": {"c": [true, "x"]}});
        let t = flatten(&v);
        assert_eq!(t.rows[0], vec!["a", "1.5", "rad/s"]);
        assert_eq!(t.rows[1], vec!["b.c.0", "true", ""]);
        assert_eq!(t.rows[2], vec!["b.c.1", "x", ""]);
    }

    #[test]
    fn csv_quotes_fields_that_need_it() {
        let mut t = Table::new(&["name", "value"]);
        t.rows.push(vec!["a, b".into(), "1".into()]);
        assert_eq!(t.to_csv().unwrap(), "name,value\r\n\"a, b\",1\r\n");
    }

    #[test]
    fn atomic_write_replaces_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
