#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use emogen_core::rig::{generate_synthetic_rig, BlendshapeRig, RigGenParams, WeightVector};
use rand::Rng;

pub fn rig() -> Arc<BlendshapeRig> {
    static RIG: OnceLock<Arc<BlendshapeRig>> = OnceLock::new();
    RIG.get_or_init(|| Arc::new(generate_synthetic_rig(&RigGenParams::default()).unwrap()))
        .clone()
}

pub fn shape(name: &str) -> usize {
    rig().shape_index(name).unwrap_or_else(|| panic!("no shape {name}"))
}

/// Arbitrary (not necessarily symmetric) weights in [0, 1) on every shape.
pub fn raw_weights<R: Rng>(rng: &mut R) -> WeightVector {
    let n = rig().shape_count();
    WeightVector::from_vec((0..n).map(|_| rng.random::<f64>()).collect())
}

/// Weights with `k` random unique cores active, completed by the rig.
pub fn sparse_face<R: Rng>(rng: &mut R, k: usize) -> WeightVector {
    let rig = rig();
    let cores = rig.unique_core_indices();
    let mut w = rig.zeros();
    for _ in 0..k {
        let i = cores[rng.random_range(0..cores.len())];
        w[i] = rng.random::<f64>();
    }
    rig.complete(&w)
}
