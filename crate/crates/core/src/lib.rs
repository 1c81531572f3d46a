//! Blendshape face rigs, automatic lip/teeth collision repair, the
//! interactive expression-evolution GA and the expression similarity metrics
//! used to analyse what it produces.
//!
//! The crate is organised bottom-up:
//!
//! * [`rig`] holds meshes, blendshape rigs, weight vectors and the procedural
//!   synthetic test rig.
//! * [`collision`] detects sub-geometry interpenetration and solves for the
//!   collision-corrective weights.
//! * [`evolution`] implements the genetic operators, the generation-advance
//!   loop and step-wise sessions.
//! * [`metrics`] provides blendshape, vertex and PCA-space distances.
//! * [`io`] reads and writes rigs, session logs and OBJ meshes.

pub mod collision;
pub mod error;
pub mod evolution;
pub mod io;
pub mod metrics;
pub mod rig;

pub use error::{Error, Result};
