//! Versioned JSON documents, JSON-lines session logs and Wavefront OBJ.

mod document;
mod log;
mod obj;

pub use document::{
    read_document, read_fixed_sets, read_rig, rig_from_str, rig_to_string, write_document,
    write_fixed_sets, write_rig, FIXED_SCHEMA, RIG_FORMAT,
};
pub use log::{log_from_str, log_to_string, read_log, write_log};
pub use obj::{obj_from_str, obj_to_string, read_obj, write_obj, write_scalar_csv};

use crate::Error;

pub(crate) fn json_error(e: serde_json::Error) -> Error {
    let line = (e.line() > 0).then_some(e.line());
    Error::parse(line, e.to_string())
}
