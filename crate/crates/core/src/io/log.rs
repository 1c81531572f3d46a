use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::evolution::{LogEnd, LogEntry, LogHeader, SessionLog, LOG_SCHEMA};
use crate::{Error, Result};

fn tagged<T: Serialize>(kind: &str, value: &T) -> Result<String> {
    let mut object = Map::new();
    object.insert("type".into(), Value::String(kind.into()));
    match serde_json::to_value(value).map_err(super::json_error)? {
        Value::Object(fields) => object.extend(fields),
        _ => return Err(Error::invalid("log line must serialize to an object")),
    }
    serde_json::to_string(&Value::Object(object)).map_err(super::json_error)
}

/// One JSON object per line: header, generation/reset entries, end.
pub fn log_to_string(log: &SessionLog) -> Result<String> {
    let mut out = tagged("header", &log.header)?;
    out.push('\n');
    for entry in &log.entries {
        out.push_str(&serde_json::to_string(entry).map_err(super::json_error)?);
        out.push('\n');
    }
    out.push_str(&tagged("end", &log.end)?);
    out.push('\n');
    Ok(out)
}

fn parse_as<T: DeserializeOwned>(value: Value, line: usize) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::parse(Some(line), e.to_string()))
}

pub fn log_from_str(text: &str) -> Result<SessionLog> {
    let mut header: Option<LogHeader> = None;
    let mut entries = Vec::new();
    let mut end: Option<LogEnd> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        if end.is_some() {
            return Err(Error::parse(Some(line), "content after end section"));
        }
        let mut value: Value =
            serde_json::from_str(raw).map_err(|e| Error::parse(Some(line), e.to_string()))?;
        let kind = value
            .get("type")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| Error::parse(Some(line), "missing field `type`"))?;

        match (kind.as_str(), header.is_some()) {
            ("header", false) => {
                value.as_object_mut().map(|o| o.remove("type"));
                let h: LogHeader = parse_as(value, line)?;
                if h.schema != LOG_SCHEMA {
                    return Err(Error::parse(
                        Some(line),
                        format!("unsupported log schema '{}'", h.schema),
                    ));
                }
                header = Some(h);
            }
            ("header", true) => return Err(Error::parse(Some(line), "duplicate header section")),
            (_, false) => return Err(Error::parse(Some(line), "missing header section")),
            ("end", true) => {
                value.as_object_mut().map(|o| o.remove("type"));
                end = Some(parse_as(value, line)?);
            }
            ("generation" | "reset", true) => entries.push(parse_as::<LogEntry>(value, line)?),
            (other, true) => {
                return Err(Error::parse(Some(line), format!("unknown line type '{other}'")));
            }
        }
    }

    let header = header.ok_or_else(|| Error::parse(None, "missing header section"))?;
    let end = end.ok_or_else(|| Error::parse(None, "missing end section (truncated log)"))?;
    Ok(SessionLog { header, entries, end })
}

pub fn write_log(path: &Path, log: &SessionLog) -> Result<()> {
    fs::write(path, log_to_string(log)?)?;
    Ok(())
}

pub fn read_log(path: &Path) -> Result<SessionLog> {
    log_from_str(&fs::read_to_string(path)?)
}
