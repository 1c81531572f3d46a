use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::covariance::{flatten_offsets, VertexCovariance};
use super::distance::{cd, ed_blend, euclidean, rms_vertices};
use super::pca::{std_ed_pca, PcaModel};
use crate::rig::{BlendshapeRig, Vec3, WeightVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    EdBlend,
    Cd,
    VrtxRms,
    EdPca,
    StdEdPca,
    MdVertex,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::EdBlend,
        MetricKind::Cd,
        MetricKind::VrtxRms,
        MetricKind::EdPca,
        MetricKind::StdEdPca,
        MetricKind::MdVertex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::EdBlend => "ed_blend",
            MetricKind::Cd => "cd",
            MetricKind::VrtxRms => "vrtx_rms",
            MetricKind::EdPca => "ed_pca",
            MetricKind::StdEdPca => "std_ed_pca",
            MetricKind::MdVertex => "md_vertex",
        }
    }

    pub fn needs_pca(self) -> bool {
        matches!(self, MetricKind::EdPca | MetricKind::StdEdPca)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown metric '{s}'")))
    }
}

/// Target representation cached for repeated distance queries.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedTarget {
    pub kind: MetricKind,
    pub weights: WeightVector,
    reduced: Vec<f64>,
    vertices: Option<Vec<Vec3>>,
    beta: Option<Vec<f64>>,
}

/// A rig plus the optional fitted models the empirical metrics need.
#[derive(Debug, Clone)]
pub struct MetricSuite {
    rig: Arc<BlendshapeRig>,
    pca: Option<PcaModel>,
    vertex_cov: Option<VertexCovariance>,
}

impl MetricSuite {
    pub fn new(rig: Arc<BlendshapeRig>) -> Self {
        MetricSuite {
            rig,
            pca: None,
            vertex_cov: None,
        }
    }

    pub fn with_pca(mut self, model: PcaModel) -> Self {
        self.pca = Some(model);
        self
    }

    pub fn with_vertex_covariance(mut self, cov: VertexCovariance) -> Self {
        self.vertex_cov = Some(cov);
        self
    }

    pub fn rig(&self) -> &Arc<BlendshapeRig> {
        &self.rig
    }

    pub fn pca(&self) -> Option<&PcaModel> {
        self.pca.as_ref()
    }

    fn require_pca(&self, kind: MetricKind) -> Result<&PcaModel> {
        self.pca
            .as_ref()
            .ok_or_else(|| Error::Config(format!("metric {kind} needs a PCA model")))
    }

    fn require_cov(&self) -> Result<&VertexCovariance> {
        self.vertex_cov
            .as_ref()
            .ok_or_else(|| Error::Config("metric md_vertex needs a vertex covariance".into()))
    }

    pub fn prepare(&self, kind: MetricKind, target: &WeightVector) -> Result<PreparedTarget> {
        self.rig.check_weights(target)?;
        let reduced = self.rig.reduce(target);
        let vertices = match kind {
            MetricKind::VrtxRms | MetricKind::MdVertex => Some(self.rig.evaluate_vertices(target)?),
            _ => None,
        };
        let beta = if kind.needs_pca() {
            Some(self.require_pca(kind)?.project(&reduced)?)
        } else {
            None
        };
        if kind == MetricKind::MdVertex {
            self.require_cov()?;
        }
        Ok(PreparedTarget {
            kind,
            weights: target.clone(),
            reduced,
            vertices,
            beta,
        })
    }

    /// Distance of `candidate` to the prepared target under the target's metric.
    pub fn distance(&self, target: &PreparedTarget, candidate: &WeightVector) -> Result<f64> {
        self.rig.check_weights(candidate)?;
        match target.kind {
            MetricKind::EdBlend => ed_blend(&target.reduced, &self.rig.reduce(candidate)),
            MetricKind::Cd => cd(target.weights.as_slice(), candidate.as_slice()),
            MetricKind::VrtxRms => {
                let v = self.rig.evaluate_vertices(candidate)?;
                Ok(rms_vertices(target.vertices.as_deref().expect("prepared"), &v))
            }
            MetricKind::EdPca => {
                let b = self.require_pca(target.kind)?.project(&self.rig.reduce(candidate))?;
                Ok(euclidean(target.beta.as_deref().expect("prepared"), &b))
            }
            MetricKind::StdEdPca => {
                let model = self.require_pca(target.kind)?;
                let b = model.project(&self.rig.reduce(candidate))?;
                std_ed_pca(target.beta.as_deref().expect("prepared"), &b, model)
            }
            MetricKind::MdVertex => {
                let v = self.rig.evaluate_vertices(candidate)?;
                let neutral = &self.rig.neutral().vertices;
                let a = flatten_offsets(target.vertices.as_deref().expect("prepared"), neutral);
                let b = flatten_offsets(&v, neutral);
                let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                self.require_cov()?.mahalanobis(&diff)
            }
        }
    }
}
