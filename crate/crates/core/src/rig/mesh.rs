use serde::{Deserialize, Serialize};

use super::geom::{self, Vec3};
use crate::{Error, Result};

/// Fixed-topology triangle mesh. Coordinates are in centimetres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = Mesh { vertices, faces };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (f, tri) in self.faces.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(Error::invalid(format!(
                    "face {f} references vertex {tri:?} but mesh has {n} vertices"
                )));
            }
        }
        if self.vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite vertex coordinate"));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn same_topology(&self, other: &Mesh) -> bool {
        self.vertices.len() == other.vertices.len() && self.faces == other.faces
    }

    pub(crate) fn check_topology(&self, other: &Mesh) -> Result<()> {
        if self.same_topology(other) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "topology mismatch ({} vs {} vertices, {} vs {} faces)",
                self.vertices.len(),
                other.vertices.len(),
                self.faces.len(),
                other.faces.len()
            )))
        }
    }

    pub fn triangle(&self, face: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Point at barycentric `(c1, c2)` of `face`; the third weight is `1 - c1 - c2`.
    pub fn barycentric_point(&self, face: usize, c1: f64, c2: f64) -> Vec3 {
        let [a, b, c] = self.triangle(face);
        let c3 = 1.0 - c1 - c2;
        [
            c1 * a[0] + c2 * b[0] + c3 * c[0],
            c1 * a[1] + c2 * b[1] + c3 * c[1],
            c1 * a[2] + c2 * b[2] + c3 * c[2],
        ]
    }

    pub fn face_normal(&self, face: usize) -> Vec3 {
        let [a, b, c] = self.triangle(face);
        geom::normalize(geom::cross(geom::sub(b, a), geom::sub(c, a)))
    }

    /// Flattened `x0 y0 z0 x1 ...` coordinates.
    pub fn flat_coordinates(&self) -> Vec<f64> {
        self.vertices.iter().flatten().copied().collect()
    }
}
