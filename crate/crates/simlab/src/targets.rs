//! Desk-scale analogs of the published study targets. The original target
//! vectors and fixed initialization sets are unpublished; these are
//! stand-ins built on the synthetic rig and labeled as such.

use emogen_core::collision::{correct_face, CorrectionParams};
use emogen_core::evolution::operators::random_member;
use emogen_core::evolution::{FixedSet, GeneSpace};
use emogen_core::rig::{BlendshapeRig, WeightVector};
use emogen_core::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeskTarget {
    pub name: String,
    pub description: String,
    pub weights: WeightVector,
}

fn build(rig: &BlendshapeRig, entries: &[(usize, f64)]) -> Result<WeightVector> {
    let mut w = rig.zeros();
    for &(i, v) in entries {
        w[i] = v;
    }
    let (w, _) = correct_face(rig, &rig.complete(&w), &CorrectionParams::default())?;
    Ok(w)
}

fn named(rig: &BlendshapeRig, name: &str) -> Result<usize> {
    rig.shape_index(name)
        .ok_or_else(|| Error::invalid(format!("rig has no shape '{name}'")))
}

/// Unique cores without eye or pupil tags, in rig order.
fn plain_cores(rig: &BlendshapeRig) -> Vec<usize> {
    rig.unique_core_indices()
        .iter()
        .copied()
        .filter(|&i| {
            let t = rig.shape(i).tags;
            !t.eye && !t.pupil
        })
        .collect()
}

/// A single active shape: `jaw_open` at 0.7.
pub fn single_shape(rig: &BlendshapeRig) -> Result<DeskTarget> {
    Ok(DeskTarget {
        name: "t1".into(),
        description: "desk analog, 1 active shape".into(),
        weights: build(rig, &[(named(rig, "jaw_open")?, 0.7)])?,
    })
}

/// `jaw_open` plus a mirrored `nose_wrinkle` pair: three active shapes that
/// differ from [`single_shape`] by one unique core.
pub fn three_shape(rig: &BlendshapeRig) -> Result<DeskTarget> {
    Ok(DeskTarget {
        name: "t3".into(),
        description: "desk analog, 3 active shapes, similar to t1".into(),
        weights: build(
            rig,
            &[(named(rig, "jaw_open")?, 0.7), (named(rig, "nose_wrinkle_L")?, 0.6)],
        )?,
    })
}

/// Twelve active unique cores with varied intensities.
pub fn twelve_shape(rig: &BlendshapeRig) -> Result<DeskTarget> {
    let cores = plain_cores(rig);
    if cores.len() < 12 {
        return Err(Error::invalid("rig has fewer than 12 plain unique cores"));
    }
    let entries: Vec<(usize, f64)> = cores
        .iter()
        .take(12)
        .enumerate()
        .map(|(k, &i)| (i, 0.25 + 0.06 * ((k * 7) % 11) as f64))
        .collect();
    Ok(DeskTarget {
        name: "t2".into(),
        description: "desk analog, 12 active unique cores".into(),
        weights: build(rig, &entries)?,
    })
}

/// Every plain unique core active: the densest target the rig supports.
pub fn dense(rig: &BlendshapeRig) -> Result<DeskTarget> {
    let entries: Vec<(usize, f64)> = plain_cores(rig)
        .into_iter()
        .enumerate()
        .map(|(k, i)| (i, 0.2 + 0.05 * ((k * 5) % 13) as f64))
        .collect();
    Ok(DeskTarget {
        name: "dense".into(),
        description: "desk analog of the 125-shape target, all plain unique cores".into(),
        weights: build(rig, &entries)?,
    })
}

/// The 1-, 3- and 12-shape targets in order of complexity.
pub fn complexity_targets(rig: &BlendshapeRig) -> Result<Vec<DeskTarget>> {
    Ok(vec![single_shape(rig)?, three_shape(rig)?, twelve_shape(rig)?])
}

pub fn by_name(rig: &BlendshapeRig, name: &str) -> Result<DeskTarget> {
    match name {
        "t1" => single_shape(rig),
        "t2" => twelve_shape(rig),
        "t3" => three_shape(rig),
        "dense" => dense(rig),
        other => Err(Error::invalid(format!(
            "unknown desk target '{other}' (expected t1, t2, t3 or dense)"
        ))),
    }
}

/// `count` seeded sets of ten random members with `active` unique cores each.
pub fn desk_fixed_sets(rig: &BlendshapeRig, count: usize, active: usize, seed: u64) -> Result<Vec<FixedSet>> {
    let space = GeneSpace::new(rig, false, false);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let members = (0..10)
                .map(|_| random_member(&space, active, &mut rng).map(|(w, _)| w))
                .collect::<Result<_>>()?;
            Ok(FixedSet {
                name: format!("desk-fixed-{k}"),
                members,
            })
        })
        .collect()
}
