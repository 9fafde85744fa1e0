//! Line-delimited JSON files with strict schemas and positional error
//! reporting, plus a fixed-precision JSON printer for report files.

use serde::de::DeserializeOwned;
use serde::Serialize;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error("{path} line {line}: {detail}")]
    Schema { path: String, line: usize, detail: String },
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> JsonlError {
    JsonlError::Io { path: path.display().to_string(), detail: e.to_string() }
}

/// Read a JSONL file into typed records. Blank lines are rejected, not
/// skipped: a gap means the file was not produced by this pipeline.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        let record: T = serde_json::from_str(&line).map_err(|e| JsonlError::Schema {
            path: path.display().to_string(),
            line: idx + 1,
            detail: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Write records one JSON object per line, with a trailing newline.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), JsonlError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
    }
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    for record in records {
        let line =
            serde_json::to_string(record).map_err(|e| io_error(path, format!("serialize: {e}")))?;
        writeln!(writer, "{line}").map_err(|e| io_error(path, e))?;
    }
    writer.flush().map_err(|e| io_error(path, e))
}

fn write_fixed_value(value: &serde_json::Value, out: &mut String) {
    match value {
        serde_json::Value::Null => out.push_str("null"),
        serde_json::Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().expect("JSON number is i64, u64 or f64");
                out.push_str(&format!("{f:.6}"));
            }
        }
        serde_json::Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings serialize"));
        }
        serde_json::Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_fixed_value(item, out);
            }
            out.push(']');
        }
        serde_json::Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("keys serialize"));
                out.push(':');
                write_fixed_value(item, out);
            }
            out.push('}');
        }
    }
}

/// Serialize to JSON with every real number printed with exactly six
/// decimal places (integers stay integers). Reports use this so diffs
/// between runs compare cleanly.
pub fn to_json_fixed<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let tree = serde_json::to_value(value)?;
    let mut out = String::new();
    write_fixed_value(&tree, &mut out);
    out.push('\n');
    Ok(out)
}

/// Write a value as fixed-precision JSON.
pub fn write_json_fixed<T: Serialize>(path: &Path, value: &T) -> Result<(), JsonlError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
    }
    let body = to_json_fixed(value).map_err(|e| io_error(path, format!("serialize: {e}")))?;
    std::fs::write(path, body).map_err(|e| io_error(path, e))
}
