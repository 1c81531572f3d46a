use emogen_core::evolution::{FixedSet, GaConfig, Provenance, SessionState};
use emogen_core::rig::{Vec3, WeightVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreateSession {
    /// Rig id; the registry default when absent.
    pub rig: Option<String>,
    pub config: GaConfig,
    pub fixed_sets: Vec<FixedSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionHandle {
    pub id: String,
    pub rig: String,
    pub state: SessionState,
    pub generation: usize,
    pub config: GaConfig,
}

/// Triangle list shared by every face of a rig.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub id: String,
    pub faces: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacePayload {
    pub index: usize,
    pub weights: WeightVector,
    pub vertices: Vec<Vec3>,
    /// Id of the [`Topology`] the vertices index into.
    pub topology: String,
    pub provenance: Provenance,
    pub corrected: bool,
    pub unresolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationPayload {
    pub session: String,
    pub generation: usize,
    pub max_generations: usize,
    pub min_selections: usize,
    pub max_selections: usize,
    pub topology: Topology,
    pub faces: Vec<FacePayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionRequest {
    /// Generation the selection was made on; a stale value is rejected.
    pub generation: usize,
    pub elite: usize,
    #[serde(default)]
    pub others: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResponse {
    #[serde(rename = "final")]
    pub is_final: bool,
    pub generation: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<PopulationPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elite: Option<WeightVector>,
    /// Path of the session log.
    pub log: String,
}
