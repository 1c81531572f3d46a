use serde::{Deserialize, Serialize};

use super::raycast::{cast, Hit};
use crate::rig::geom::{self, Vec3};
use crate::rig::{Anchor, AnchorSet, BlendshapeRig, CollisionConfig, CollisionKind, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// The anchor lies inside the lower lip.
    Within,
    /// The anchor has passed through the lower lip.
    Through,
}

/// An upper-lip or teeth anchor involved in an interpenetration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub kind: CollisionKind,
    /// Index into the probing anchor set of `kind`.
    pub anchor: usize,
    pub scenario: Scenario,
    /// Paired lower-lip face and the distance to it along the
    /// collision-neutralizing direction, when the pairing ray found one.
    pub pair: Option<(usize, f64)>,
}

/// A single depth constraint row of the corrective least-squares problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionConstraint {
    pub kind: CollisionKind,
    pub anchor: usize,
    pub hit_face: usize,
    pub scenario: Scenario,
    /// Interpenetration depth in cm.
    pub depth: f64,
    /// Depth eliminated per unit weight of each collision corrective, in
    /// solver column order.
    pub coeffs: [f64; 8],
}

pub fn sample_anchors(mesh: &Mesh, anchors: &AnchorSet) -> Vec<Vec3> {
    anchors
        .points
        .iter()
        .map(|a| mesh.barycentric_point(a.face, a.c1, a.c2))
        .collect()
}

fn odd(n: usize) -> bool {
    n % 2 == 1
}

fn opposite(d: Vec3) -> Vec3 {
    geom::scale(d, -1.0)
}

fn within_along(mesh: &Mesh, targets: &[usize], p: Vec3, d: Vec3) -> bool {
    odd(cast(mesh, targets, p, d).len()) && odd(cast(mesh, targets, p, opposite(d)).len())
}

/// Classifies every upper-lip and teeth anchor against the lower lip.
///
/// An anchor is within the lower lip when rays in both senses of either
/// collision direction cross the lower-lip surface an odd number of times.
/// It has passed through when, not being within, the ray against its own
/// type's positive direction meets two oppositely oriented lower-lip faces.
pub fn detect_collisions(mesh: &Mesh, config: &CollisionConfig) -> Vec<Detection> {
    let targets = &config.lower_lip.faces;
    let mut out = Vec::new();
    for kind in CollisionKind::ALL {
        let own = config.direction(kind);
        let other = config.direction(match kind {
            CollisionKind::Lip => CollisionKind::Teeth,
            CollisionKind::Teeth => CollisionKind::Lip,
        });
        let set = config.probe_set(kind);
        for (i, p) in sample_anchors(mesh, set).into_iter().enumerate() {
            let negative: Vec<Hit> = cast(mesh, targets, p, opposite(own));
            let within = (odd(negative.len()) && odd(cast(mesh, targets, p, own).len()))
                || within_along(mesh, targets, p, other);
            if within {
                out.push(Detection {
                    kind,
                    anchor: i,
                    scenario: Scenario::Within,
                    pair: negative.first().map(|h| (h.face, h.t)),
                });
            } else if negative.len() >= 2 && negative[0].exiting != negative[1].exiting {
                out.push(Detection {
                    kind,
                    anchor: i,
                    scenario: Scenario::Through,
                    pair: Some((negative[1].face, negative[1].t)),
                });
            }
        }
    }
    out
}

/// Collision types with at least one anchor within the lower lip, indexed by
/// [`CollisionKind::index`].
pub fn detected_types(detections: &[Detection]) -> [bool; 2] {
    let mut out = [false; 2];
    for d in detections {
        if d.scenario == Scenario::Within {
            out[d.kind.index()] = true;
        }
    }
    out
}

pub fn is_colliding(detections: &[Detection]) -> bool {
    detected_types(detections).contains(&true)
}

fn lower_lip_point(config: &CollisionConfig, face: usize) -> Anchor {
    config
        .lower_lip
        .points
        .iter()
        .find(|a| a.face == face)
        .copied()
        .unwrap_or(Anchor::centroid(face))
}

/// Turns detections into depth constraints. Only collision types with a
/// within anchor produce rows, and coefficients of the other type's
/// correctives are zero unless both types were detected.
pub fn quantify_depth(rig: &BlendshapeRig, detections: &[Detection]) -> Vec<CollisionConstraint> {
    let detected = detected_types(detections);
    let both = detected[0] && detected[1];
    let config = rig.collision();
    let columns = rig.collision_columns();
    let mut out = Vec::new();
    for d in detections {
        if !detected[d.kind.index()] {
            continue;
        }
        let Some((hit_face, depth)) = d.pair else {
            continue;
        };
        let neutralizing = opposite(config.direction(d.kind));
        let anchor = config.probe_set(d.kind).points[d.anchor];
        let partner = lower_lip_point(config, hit_face);
        let mut coeffs = [0.0; 8];
        for (col, &shape) in columns.iter().enumerate() {
            if col / 4 != d.kind.index() && !both {
                continue;
            }
            let rel = geom::sub(rig.shape_delta_at(shape, anchor), rig.shape_delta_at(shape, partner));
            coeffs[col] = geom::dot(rel, neutralizing);
        }
        out.push(CollisionConstraint {
            kind: d.kind,
            anchor: d.anchor,
            hit_face,
            scenario: d.scenario,
            depth,
            coeffs,
        });
    }
    out
}
