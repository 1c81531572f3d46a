use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::rig::Mesh;
use crate::{Error, Result};

/// Vertices are written with shortest round-trip formatting.
pub fn obj_to_string(mesh: &Mesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

/// Reads `v` and triangular `f` records; other records are ignored.
pub fn obj_from_str(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in &mut p {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| Error::parse(Some(line), "vertex needs 3 coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| Error::parse(Some(line), format!("bad coordinate '{tok}'")))?;
                }
                vertices.push(p);
            }
            Some("f") => {
                let idx = tokens
                    .map(|tok| {
                        let head = tok.split('/').next().unwrap_or(tok);
                        head.parse::<usize>()
                            .ok()
                            .filter(|&k| k >= 1)
                            .map(|k| k - 1)
                            .ok_or_else(|| Error::parse(Some(line), format!("bad index '{tok}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if idx.len() != 3 {
                    return Err(Error::parse(Some(line), "only triangular faces are supported"));
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    Mesh::new(vertices, faces)
}

pub fn write_obj(path: &Path, mesh: &Mesh) -> Result<()> {
    fs::write(path, obj_to_string(mesh))?;
    Ok(())
}

pub fn read_obj(path: &Path) -> Result<Mesh> {
    obj_from_str(&fs::read_to_string(path)?)
}

/// Per-vertex scalar field as `vertex,value` CSV, for heatmap overlays.
pub fn write_scalar_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut out = String::from("vertex,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{v}");
    }
    fs::write(path, out)?;
    Ok(())
}
