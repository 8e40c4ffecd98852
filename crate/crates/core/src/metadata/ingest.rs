//! Line-delimited demonstration files: one JSON record per line.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde_json::Value;
use thiserror::Error;

use super::record::DemoRecord;
use crate::pose::quat_norm_ok;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed reading input: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: u64,
        field: String,
        message: String,
    },
    #[error("line {line}: quaternion `{field}` is not unit norm")]
    QuaternionNorm { line: u64, field: String },
}

impl IngestError {
    pub fn line(&self) -> Option<u64> {
        match self {
            IngestError::Io(_) => None,
            IngestError::Schema { line, .. } | IngestError::QuaternionNorm { line, .. } => Some(*line),
        }
    }
}

pub fn ingest(path: impl AsRef<Path>) -> Result<Vec<DemoRecord>, IngestError> {
    let file = File::open(path)?;
    ingest_reader(BufReader::with_capacity(1 << 20, file))
}

/// Parse and validate every non-blank line. Stops at the first bad record.
pub fn ingest_reader(mut reader: impl BufRead) -> Result<Vec<DemoRecord>, IngestError> {
    let mut records = Vec::new();
    let mut buf = String::new();
    let mut line_no = 0u64;
    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let text = buf.trim();
        if text.is_empty() {
            continue;
        }
        records.push(parse_line(text, line_no)?);
    }
    Ok(records)
}

pub fn parse_line(text: &str, line: u64) -> Result<DemoRecord, IngestError> {
    let record: DemoRecord = serde_json::from_str(text).map_err(|e| {
        let (field, message) = locate_schema_error(text, &e);
        IngestError::Schema { line, field, message }
    })?;
    validate(&record, line)?;
    Ok(record)
}

/// Invariants serde cannot express.
pub fn validate(record: &DemoRecord, line: u64) -> Result<(), IngestError> {
    let schema = |field: String, message: String| IngestError::Schema { line, field, message };
    if record.id.is_empty() {
        return Err(schema("id".into(), "must be non-empty".into()));
    }
    if record.steps.is_empty() {
        return Err(schema("steps".into(), "must contain at least one step".into()));
    }
    if !record.camera_extrinsics.pos.iter().all(|v| v.is_finite()) {
        return Err(schema("camera_extrinsics.pos".into(), "must be finite".into()));
    }
    if !quat_norm_ok(&record.camera_extrinsics.quat) {
        return Err(IngestError::QuaternionNorm {
            line,
            field: "camera_extrinsics.quat".into(),
        });
    }
    let mut prev_t: Option<i64> = None;
    for (i, step) in record.steps.iter().enumerate() {
        if let Some(p) = prev_t {
            if step.t <= p {
                return Err(schema(
                    format!("steps[{i}].t"),
                    format!("timesteps must strictly increase ({} after {p})", step.t),
                ));
            }
        }
        prev_t = Some(step.t);
        if !(0.0..=1.0).contains(&step.gripper) {
            return Err(schema(
                format!("steps[{i}].gripper"),
                format!("must lie in [0, 1], got {}", step.gripper),
            ));
        }
        if !step.ee_pos.iter().all(|v| v.is_finite()) {
            return Err(schema(format!("steps[{i}].ee_pos"), "must be finite".into()));
        }
        if !quat_norm_ok(&step.ee_quat) {
            return Err(IngestError::QuaternionNorm {
                line,
                field: format!("steps[{i}].ee_quat"),
            });
        }
    }
    Ok(())
}

type FieldCheck = fn(&Value) -> Option<String>;
type StepCheck = fn(&Value) -> bool;

/// Best-effort path of the offending field for a failed typed parse.
fn locate_schema_error(text: &str, err: &serde_json::Error) -> (String, String) {
    let Ok(value) = serde_json::from_str::<Value>(text) else {
        return ("record".into(), format!("invalid JSON: {err}"));
    };
    let Some(obj) = value.as_object() else {
        return ("record".into(), "record must be a JSON object".into());
    };
    let checks: [(&str, FieldCheck); 5] = [
        ("id", |v| (!v.is_string()).then(|| "expected string".into())),
        ("lab", |v| (!v.is_string()).then(|| "expected string".into())),
        ("instructions", |v| match v.as_array() {
            Some(a) if a.iter().all(Value::is_string) => None,
            _ => Some("expected array of strings".into()),
        }),
        ("camera_extrinsics", |v| {
            let ok = v.get("pos").is_some_and(|p| numeric_array(p, 3))
                && v.get("quat").is_some_and(|q| numeric_array(q, 4));
            (!ok).then(|| "expected {\"pos\":[x,y,z],\"quat\":[w,x,y,z]}".into())
        }),
        ("steps", |v| (!v.is_array()).then(|| "expected array".into())),
    ];
    for (field, check) in checks {
        match obj.get(field) {
            None => return (field.into(), "missing required field".into()),
            Some(v) => {
                if let Some(msg) = check(v) {
                    return (field.into(), msg);
                }
            }
        }
    }
    if let Some(steps) = obj.get("steps").and_then(Value::as_array) {
        for (i, s) in steps.iter().enumerate() {
            let checks: [(&str, StepCheck); 4] = [
                ("t", |v| v.is_i64()),
                ("ee_pos", |v| numeric_array(v, 3)),
                ("ee_quat", |v| numeric_array(v, 4)),
                ("gripper", Value::is_number),
            ];
            for (field, ok) in checks {
                if !s.get(field).is_some_and(ok) {
                    return (format!("steps[{i}].{field}"), "missing or mistyped".into());
                }
            }
        }
    }
    if obj.get("annotations").is_some_and(|a| !a.is_null() && !a.is_object()) {
        return ("annotations".into(), "expected object or null".into());
    }
    ("annotations".into(), err.to_string())
}

fn numeric_array(v: &Value, len: usize) -> bool {
    v.as_array()
        .is_some_and(|a| a.len() == len && a.iter().all(Value::is_number))
}

pub fn write_records<'a>(
    mut out: impl Write,
    records: impl IntoIterator<Item = &'a DemoRecord>,
) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
