use serde::{Deserialize, Serialize};

/// Per-shape blendshape weights, indexed like the rig's shape list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn zeros(len: usize) -> Self {
        WeightVector(vec![0.0; len])
    }

    /// Wraps raw values without any range checks.
    pub fn from_vec(values: Vec<f64>) -> Self {
        WeightVector(values)
    }

    /// Wraps values read from an external source, clamping anything outside
    /// `[0, 1]` (non-finite values become 0) and logging each repair.
    pub fn from_ingest(mut values: Vec<f64>) -> Self {
        for (i, v) in values.iter_mut().enumerate() {
            let repaired = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
            if repaired != *v {
                log::warn!("weight {i} = {v} outside [0, 1], clamped to {repaired}");
                *v = repaired;
            }
        }
        WeightVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Number of entries among `indices` with a non-zero weight.
    pub fn active_count(&self, indices: &[usize]) -> usize {
        indices.iter().filter(|&&i| self.0[i] != 0.0).count()
    }

    /// `a * self + (1 - a) * other`, entrywise.
    pub fn lerp(&self, other: &WeightVector, a: f64) -> WeightVector {
        WeightVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| a * x + (1.0 - a) * y)
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for WeightVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}
