use serde::{Deserialize, Serialize};

use super::detect::{detect_collisions, is_colliding, quantify_depth, CollisionConstraint, Detection};
use super::solver::{solve_correctives_bounded, DEFAULT_W1};
use crate::rig::{BlendshapeRig, WeightVector};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorrectionParams {
    pub w1: f64,
    pub max_iters: usize,
    /// Extra separation in cm added to every depth target.
    pub clearance: f64,
    /// Keep per-pass detections, constraints and solutions in the result.
    pub diagnostics: bool,
}

impl Default for CorrectionParams {
    fn default() -> Self {
        CorrectionParams {
            w1: DEFAULT_W1,
            max_iters: 3,
            clearance: 0.05,
            diagnostics: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassDiagnostics {
    pub detections: Vec<Detection>,
    pub constraints: Vec<CollisionConstraint>,
    pub increment: [f64; 8],
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub w_clsn: [f64; 8],
    pub residual: f64,
    pub iterations: usize,
    pub constraints_before: usize,
    pub constraints_after: usize,
    pub unresolved: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<PassDiagnostics>,
}

impl CorrectionResult {
    pub fn corrected(&self) -> bool {
        self.iterations > 0
    }
}

/// Fills the collision-corrective entries of `w`.
///
/// Collision entries are reset, then detection, depth quantification and the
/// corrective solve repeat on the re-evaluated face until no anchor lies
/// within the lower lip or `max_iters` solves have run. Each solve adds an
/// increment bounded so the totals stay in `[0, 1]`. The iterate with the
/// fewest remaining constraints is returned, flagged when still colliding.
pub fn correct_face(
    rig: &BlendshapeRig,
    w: &WeightVector,
    params: &CorrectionParams,
) -> Result<(WeightVector, CorrectionResult)> {
    rig.check_weights(w)?;
    let columns = *rig.collision_columns();
    let mut current = w.clone();
    for &c in &columns {
        current[c] = 0.0;
    }
    let config = rig.collision();
    let mut detections = detect_collisions(&rig.evaluate(&current)?, config);
    let mut colliding = is_colliding(&detections);
    let mut constraints = quantify_depth(rig, &detections);
    let constraints_before = constraints.len();

    let mut best = (constraints.len(), colliding, current.clone(), 0.0, 0);
    let mut iterations = 0;
    let mut diagnostics = Vec::new();
    while colliding && !constraints.is_empty() && iterations < params.max_iters {
        let upper: [f64; 8] = std::array::from_fn(|j| 1.0 - current[columns[j]]);
        let targets: Vec<CollisionConstraint> = constraints
            .iter()
            .map(|c| CollisionConstraint {
                depth: c.depth + params.clearance,
                ..c.clone()
            })
            .collect();
        let out = solve_correctives_bounded(&targets, params.w1, &upper)?;
        for (j, &c) in columns.iter().enumerate() {
            current[c] = (current[c] + out.w[j]).clamp(0.0, 1.0);
        }
        iterations += 1;
        let residual = out.cost;
        if params.diagnostics {
            diagnostics.push(PassDiagnostics {
                detections: std::mem::take(&mut detections),
                constraints: targets,
                increment: out.w,
                cost: out.cost,
            });
        }
        detections = detect_collisions(&rig.evaluate(&current)?, config);
        colliding = is_colliding(&detections);
        constraints = quantify_depth(rig, &detections);
        if constraints.len() <= best.0 {
            best = (constraints.len(), colliding, current.clone(), residual, iterations);
        }
    }

    let (constraints_after, still_colliding, chosen, chosen_residual, _) = best;
    let w_clsn = std::array::from_fn(|j| chosen[columns[j]]);
    Ok((
        chosen,
        CorrectionResult {
            w_clsn,
            residual: chosen_residual,
            iterations,
            constraints_before,
            constraints_after,
            unresolved: still_colliding,
            diagnostics,
        },
    ))
}
