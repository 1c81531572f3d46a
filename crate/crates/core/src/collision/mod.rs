//! Lip and teeth interpenetration detection and automatic corrective weights.

mod correct;
mod detect;
pub mod raycast;
mod solver;

pub use correct::{correct_face, CorrectionParams, CorrectionResult, PassDiagnostics};
pub use detect::{
    detect_collisions, detected_types, is_colliding, quantify_depth, sample_anchors,
    CollisionConstraint, Detection, Scenario,
};
pub use solver::{
    box_ridge_lsq, corrective_cost, solve_correctives, solve_correctives_bounded, SolveOutput,
    SolvePass, DEFAULT_W1,
};
