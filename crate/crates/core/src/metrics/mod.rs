//! Expression similarity metrics in the blendshape, vertex and PCA domains.

mod covariance;
mod distance;
mod pca;
mod suite;

pub use covariance::{md_vertex, offset_vector, VertexCovariance};
pub use distance::{cd, cd_weights, ed_blend, vertex_distance_field, vrtx_rms};
pub use pca::{ed_pca, md_pca, std_ed_pca, PcaModel, DEFAULT_VARIANCE_TARGET};
pub use suite::{MetricKind, MetricSuite, PreparedTarget};
