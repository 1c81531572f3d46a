use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::rig::{Mesh, Vec3};
use crate::{Error, Result};

/// Regularized covariance of 3N-dimensional vertex offset vectors, kept as
/// its non-negligible eigenpairs: `S = sum_i lambda_i v_i v_i^T`. The
/// regularized matrix is `S + eps I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexCovariance {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub epsilon: f64,
}

fn epsilon_for(trace: f64, dim: usize) -> f64 {
    1e-8 * trace / dim as f64
}

impl VertexCovariance {
    /// Sample covariance of flattened offset vectors, computed through the
    /// `n x n` Gram matrix so the `3N x 3N` matrix is never formed.
    pub fn fit(offsets: &[Vec<f64>]) -> Result<Self> {
        let n = offsets.len();
        if n < 2 {
            return Err(Error::invalid("vertex covariance needs at least two samples"));
        }
        let dim = offsets[0].len();
        if let Some(s) = offsets.iter().find(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.len(),
            });
        }
        let mut mean = vec![0.0; dim];
        for s in offsets {
            for (m, x) in mean.iter_mut().zip(s) {
                *m += x / n as f64;
            }
        }
        let x = DMatrix::from_fn(n, dim, |r, c| offsets[r][c] - mean[c]);
        let gram = (&x * x.transpose()) / (n as f64 - 1.0);
        let eig = SymmetricEigen::new(gram);
        let trace: f64 = eig.eigenvalues.iter().map(|l| l.max(0.0)).sum();
        if trace <= 0.0 {
            return Err(Error::Numerical("vertex offsets have zero variance".into()));
        }
        let cutoff = 1e-12 * trace;
        let mut pairs: Vec<(f64, Vec<f64>)> = Vec::new();
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            if l <= cutoff {
                continue;
            }
            let u = eig.eigenvectors.column(i);
            let v = x.transpose() * u / ((n as f64 - 1.0) * l).sqrt();
            pairs.push((l, v.iter().copied().collect()));
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(VertexCovariance {
            dim,
            epsilon: epsilon_for(trace, dim),
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            eigenvectors: pairs.into_iter().map(|p| p.1).collect(),
        })
    }

    /// Wraps an explicit symmetric covariance matrix given row by row.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("covariance matrix must be square"));
        }
        let s = DMatrix::from_fn(dim, dim, |r, c| rows[r][c]);
        if (&s - s.transpose()).amax() > 1e-12 * s.amax().max(1.0) {
            return Err(Error::invalid("covariance matrix must be symmetric"));
        }
        let trace = s.trace();
        let epsilon = epsilon_for(trace, dim);
        let eig = SymmetricEigen::new(s);
        if eig.eigenvalues.iter().any(|&l| l + epsilon <= 0.0) || trace <= 0.0 {
            return Err(Error::Numerical(
                "covariance is not positive definite after regularization".into(),
            ));
        }
        Ok(VertexCovariance {
            dim,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: (0..dim)
                .map(|i| eig.eigenvectors.column(i).iter().copied().collect())
                .collect(),
            epsilon,
        })
    }

    /// `sqrt(d^T (S + eps I)^{-1} d)`.
    pub fn mahalanobis(&self, d: &[f64]) -> Result<f64> {
        if d.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: d.len(),
            });
        }
        let total: f64 = d.iter().map(|x| x * x).sum();
        let mut in_span = 0.0;
        let mut q = 0.0;
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let p: f64 = v.iter().zip(d).map(|(a, b)| a * b).sum();
            in_span += p * p;
            q += p * p / (l + self.epsilon);
        }
        q += (total - in_span).max(0.0) / self.epsilon;
        Ok(q.sqrt())
    }
}

/// Flattened per-vertex offsets of `mesh` from `neutral`.
pub fn offset_vector(mesh: &Mesh, neutral: &Mesh) -> Result<Vec<f64>> {
    mesh.check_topology(neutral)?;
    Ok(flatten_offsets(&mesh.vertices, &neutral.vertices))
}

pub(crate) fn flatten_offsets(v: &[Vec3], neutral: &[Vec3]) -> Vec<f64> {
    v.iter()
        .zip(neutral)
        .flat_map(|(p, q)| [p[0] - q[0], p[1] - q[1], p[2] - q[2]])
        .collect()
}

/// Vertex-domain Mahalanobis distance of two faces, each expressed as
/// offsets from `neutral`.
pub fn md_vertex(a: &Mesh, b: &Mesh, neutral: &Mesh, cov: &VertexCovariance) -> Result<f64> {
    let da = offset_vector(a, neutral)?;
    let db = offset_vector(b, neutral)?;
    let diff: Vec<f64> = da.iter().zip(&db).map(|(x, y)| x - y).collect();
    cov.mahalanobis(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_identity_halves_distance() {
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|r| (0..3).map(|c| if r == c { 4.0 } else { 0.0 }).collect())
            .collect();
        let cov = VertexCovariance::from_matrix(&rows).unwrap();
        let d = cov.mahalanobis(&[3.0, 0.0, 4.0]).unwrap();
        assert!((d - 2.5).abs() < 1e-7);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        assert!(VertexCovariance::from_matrix(&rows).is_err());
    }
}
