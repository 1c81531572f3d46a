use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_VARIANCE_TARGET: f64 = 0.99;

/// Principal component model of reduced weight vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Retained components as orthonormal rows, by decreasing variance.
    pub components: Vec<Vec<f64>>,
    /// Variance along each retained component.
    pub variances: Vec<f64>,
    /// Full eigenvalue spectrum of the sample covariance, decreasing.
    pub spectrum: Vec<f64>,
    /// Sample covariance (`n - 1` normalization) the model was built from.
    pub covariance: Vec<Vec<f64>>,
}

impl PcaModel {
    /// Fits on `samples` and keeps the fewest components whose variance
    /// reaches `variance_target` of the total.
    pub fn fit(samples: &[Vec<f64>], variance_target: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("PCA needs at least two samples"));
        }
        if !(variance_target > 0.0 && variance_target <= 1.0) {
            return Err(Error::invalid(format!(
                "variance target {variance_target} outside (0, 1]"
            )));
        }
        let d = samples[0].len();
        if let Some(s) = samples.iter().find(|s| s.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: s.len(),
            });
        }
        let n = samples.len();
        let mut mean = vec![0.0; d];
        for s in samples {
            for (m, x) in mean.iter_mut().zip(s) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let centered = DMatrix::from_fn(n, d, |r, c| samples[r][c] - mean[c]);
        let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
        let cov = (&cov + cov.transpose()) * 0.5;

        let eig = SymmetricEigen::new(cov.clone());
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        let total: f64 = spectrum.iter().sum();
        if total <= 0.0 {
            return Err(Error::Numerical("samples have zero total variance".into()));
        }
        let mut k = 0;
        let mut acc = 0.0;
        while k < d && acc < variance_target * total * (1.0 - 1e-12) {
            acc += spectrum[k];
            k += 1;
        }
        let components = order[..k]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect();
        Ok(PcaModel {
            mean,
            components,
            variances: spectrum[..k].to_vec(),
            covariance: (0..d).map(|r| cov.row(r).iter().copied().collect()).collect(),
            spectrum,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn retained(&self) -> usize {
        self.components.len()
    }

    pub fn explained_ratio(&self) -> f64 {
        self.variances.iter().sum::<f64>() / self.spectrum.iter().sum::<f64>()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(x).zip(&self.mean).map(|((ci, xi), mi)| ci * (xi - mi)).sum())
            .collect())
    }

    pub fn reconstruct(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, b) in self.components.iter().zip(beta) {
            for (o, ci) in out.iter_mut().zip(c) {
                *o += b * ci;
            }
        }
        out
    }

    fn check_beta(&self, a: &[f64], b: &[f64]) -> Result<()> {
        for v in [a, b] {
            if v.len() != self.retained() {
                return Err(Error::DimensionMismatch {
                    expected: self.retained(),
                    actual: v.len(),
                });
            }
        }
        if let Some(i) = self.variances.iter().position(|&s| s <= 0.0) {
            return Err(Error::UndefinedMetric(format!(
                "PCA component {i} has zero variance"
            )));
        }
        Ok(())
    }
}

/// Euclidean distance of two PCA projections.
pub fn ed_pca(a: &[f64], b: &[f64]) -> Result<f64> {
    super::distance::ed_blend(a, b)
}

/// Standardized Euclidean distance: differences scaled by component variance.
pub fn std_ed_pca(a: &[f64], b: &[f64], model: &PcaModel) -> Result<f64> {
    model.check_beta(a, b)?;
    Ok(a.iter()
        .zip(b)
        .zip(&model.variances)
        .map(|((x, y), s)| (x - y).powi(2) / s)
        .sum::<f64>()
        .sqrt())
}

/// Mahalanobis distance in PCA space, with the projection covariance
/// `C S C^T` formed from the stored sample covariance and inverted by
/// Cholesky factorization.
pub fn md_pca(a: &[f64], b: &[f64], model: &PcaModel) -> Result<f64> {
    model.check_beta(a, b)?;
    let d = model.dim();
    let k = model.retained();
    let c = DMatrix::from_fn(k, d, |r, j| model.components[r][j]);
    let s = DMatrix::from_fn(d, d, |r, j| model.covariance[r][j]);
    let sigma = &c * s * c.transpose();
    let chol = sigma
        .cholesky()
        .ok_or_else(|| Error::Numerical("PCA-space covariance is not positive definite".into()))?;
    let delta = DVector::from_iterator(k, a.iter().zip(b).map(|(x, y)| x - y));
    let solved = chol.solve(&delta);
    Ok(delta.dot(&solved).max(0.0).sqrt())
}
