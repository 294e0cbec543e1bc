//! NDJSON commit-log reader.
//!
//! Each line holds one commit:
//! `{"id": str, "an": str, "ae": str, "ts": int, "ch": [[kind, path] | ["R", new, old], ...]}`
//! with kind one of `A`, `M`, `D`, `R`. Unknown keys are ignored; blank lines are skipped.

use std::io::BufRead;

use serde_json::{Map, Value};

use super::{normalize_path, CommitRecord, DeveloperId, FileChange};
use crate::error::{Error, Result};

pub fn parse_commit_log<R: BufRead>(reader: R) -> Result<Vec<CommitRecord>> {
    let mut records = Vec::new();
    let mut last_ts: Option<i64> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_line(&line, line_no)?;
        if let Some(prev) = last_ts {
            if record.timestamp < prev {
                log::warn!(
                    "line {line_no}: commit {} is older than its predecessor ({} < {prev})",
                    record.id,
                    record.timestamp
                );
            }
        }
        last_ts = Some(record.timestamp);
        records.push(record);
    }
    Ok(records)
}

/// Concatenates several logs into one stream, oldest log first. Used to join
/// pre-history exports with the main repository export.
pub fn parse_commit_logs<R: BufRead>(readers: impl IntoIterator<Item = R>) -> Result<Vec<CommitRecord>> {
    let mut all = Vec::new();
    for reader in readers {
        all.extend(parse_commit_log(reader)?);
    }
    Ok(all)
}

fn parse_line(line: &str, line_no: usize) -> Result<CommitRecord> {
    let value: Value = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })?;
    let schema = |message: String| Error::Schema {
        line: line_no,
        message,
    };
    let obj = value
        .as_object()
        .ok_or_else(|| schema("expected a JSON object".into()))?;

    let id = string_field(obj, "id").map_err(schema)?;
    let name = string_field(obj, "an").map_err(schema)?;
    let email = string_field(obj, "ae").map_err(schema)?;
    let timestamp = match obj.get("ts") {
        None => return Err(schema("missing field \"ts\"".into())),
        Some(v) => v
            .as_i64()
            .ok_or_else(|| schema("field \"ts\" must be an integer".into()))?,
    };
    let entries = match obj.get("ch") {
        None => return Err(schema("missing field \"ch\"".into())),
        Some(Value::Array(entries)) => entries,
        Some(_) => return Err(schema("field \"ch\" must be an array".into())),
    };

    let mut changes = Vec::with_capacity(entries.len());
    for (pos, entry) in entries.iter().enumerate() {
        changes.push(parse_change(entry).map_err(|m| schema(format!("ch[{pos}]: {m}")))?);
    }

    Ok(CommitRecord {
        id,
        author: DeveloperId::new(&name, &email),
        timestamp,
        changes,
    })
}

fn string_field(obj: &Map<String, Value>, key: &str) -> std::result::Result<String, String> {
    match obj.get(key) {
        None => Err(format!("missing field {key:?}")),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(format!("field {key:?} must be a string")),
    }
}

fn parse_change(entry: &Value) -> std::result::Result<FileChange, String> {
    let parts = entry
        .as_array()
        .ok_or("expected an array")?
        .iter()
        .map(|p| p.as_str().ok_or("entries must be strings"))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let path = |raw: &str| normalize_path(raw).map_err(|e| e.to_string());
    match parts.as_slice() {
        ["A", p] => Ok(FileChange::add(&path(p)?)),
        ["M", p] => Ok(FileChange::modify(&path(p)?)),
        ["D", p] => Ok(FileChange::delete(&path(p)?)),
        ["R", new, old] => Ok(FileChange::rename(&path(old)?, &path(new)?)),
        ["R", ..] => Err("rename needs [\"R\", new_path, old_path]".into()),
        [kind, _] => Err(format!("unknown change kind {kind:?}")),
        _ => Err("expected [kind, path]".into()),
    }
}
