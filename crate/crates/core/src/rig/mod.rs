//! Meshes, blendshape rigs and the procedural synthetic rig.

pub mod geom;
mod mesh;
mod model;
mod synth;
mod weights;

pub use geom::Vec3;
pub use mesh::Mesh;
pub use model::{
    Anchor, AnchorRegion, AnchorSet, BlendshapeRig, CollisionConfig, CollisionKind, Emotion,
    RigData, Shape, ShapeKind, ShapeTags, Zone,
};
pub use synth::{generate_synthetic_rig, RigGenParams};
pub use weights::WeightVector;
