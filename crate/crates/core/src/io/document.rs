use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::json_error;
use crate::evolution::FixedSet;
use crate::rig::{BlendshapeRig, RigData};
use crate::{Error, Result};

pub const RIG_FORMAT: &str = "rigfmt/1";
pub const FIXED_SCHEMA: &str = "emogen-fixed/1";

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema: String,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize, Deserialize)]
struct RigFile {
    format: String,
    #[serde(flatten)]
    data: RigData,
}

/// Writes `value` as a pretty-printed JSON document tagged with `schema`.
pub fn write_document<T: Serialize>(path: &Path, schema: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(&Envelope {
        schema: schema.to_string(),
        body: value,
    })
    .map_err(json_error)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_document<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<T> {
    let text = fs::read_to_string(path)?;
    let doc: Envelope<T> = serde_json::from_str(&text).map_err(json_error)?;
    if doc.schema != schema {
        return Err(Error::parse(
            None,
            format!("expected schema '{schema}', found '{}'", doc.schema),
        ));
    }
    Ok(doc.body)
}

pub fn rig_to_string(rig: &BlendshapeRig) -> Result<String> {
    serde_json::to_string_pretty(&RigFile {
        format: RIG_FORMAT.into(),
        data: rig.data().clone(),
    })
    .map_err(json_error)
}

pub fn rig_from_str(text: &str) -> Result<BlendshapeRig> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(json_error)?;
    match value.get("format").and_then(|f| f.as_str()) {
        Some(RIG_FORMAT) => {}
        Some(other) => {
            return Err(Error::parse(None, format!("unsupported rig format '{other}'")));
        }
        None => return Err(Error::parse(None, "missing field `format`")),
    }
    let file: RigFile = serde_json::from_str(text).map_err(json_error)?;
    BlendshapeRig::new(file.data)
}

pub fn write_rig(path: &Path, rig: &BlendshapeRig) -> Result<()> {
    fs::write(path, rig_to_string(rig)? + "\n")?;
    Ok(())
}

pub fn read_rig(path: &Path) -> Result<BlendshapeRig> {
    rig_from_str(&fs::read_to_string(path)?)
}

#[derive(Serialize, Deserialize)]
struct FixedFile {
    sets: Vec<FixedSet>,
}

pub fn write_fixed_sets(path: &Path, sets: &[FixedSet]) -> Result<()> {
    write_document(path, FIXED_SCHEMA, &FixedFile { sets: sets.to_vec() })
}

/// Reads named initial sets; out-of-range weights are clamped.
pub fn read_fixed_sets(path: &Path) -> Result<Vec<FixedSet>> {
    let file: FixedFile = read_document(path, FIXED_SCHEMA)?;
    Ok(file
        .sets
        .into_iter()
        .map(|s| FixedSet {
            name: s.name,
            members: s
                .members
                .into_iter()
                .map(|w| crate::rig::WeightVector::from_ingest(w.into_vec()))
                .collect(),
        })
        .collect())
}
