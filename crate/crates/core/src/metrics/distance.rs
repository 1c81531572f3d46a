use crate::rig::{geom, Mesh, WeightVector};
use crate::{Error, Result};

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

/// Euclidean distance of two reduced (unique-core) weight vectors.
pub fn ed_blend(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, b)?;
    Ok(euclidean(a, b))
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Cosine distance `1 - cos(angle)`, undefined when either vector is zero.
pub fn cd(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, b)?;
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::UndefinedMetric(
            "cosine distance of a zero-norm weight vector".into(),
        ));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((1.0 - dot / (na * nb)).max(0.0))
}

pub fn cd_weights(a: &WeightVector, b: &WeightVector) -> Result<f64> {
    cd(a.as_slice(), b.as_slice())
}

/// Root-mean-square per-vertex distance of two meshes of one topology.
pub fn vrtx_rms(a: &Mesh, b: &Mesh) -> Result<f64> {
    a.check_topology(b)?;
    Ok(rms_vertices(&a.vertices, &b.vertices))
}

pub(crate) fn rms_vertices(a: &[geom::Vec3], b: &[geom::Vec3]) -> f64 {
    let n = a.len().max(1) as f64;
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(p, q)| {
            let d = geom::sub(*p, *q);
            geom::dot(d, d)
        })
        .sum();
    (sum / n).sqrt()
}

/// Per-vertex Euclidean distance field between two meshes.
pub fn vertex_distance_field(a: &Mesh, b: &Mesh) -> Result<Vec<f64>> {
    a.check_topology(b)?;
    Ok(a.vertices
        .iter()
        .zip(&b.vertices)
        .map(|(p, q)| geom::dist(*p, *q))
        .collect())
}
