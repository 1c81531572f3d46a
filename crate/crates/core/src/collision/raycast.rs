use crate::rig::geom::{self, Vec3};
use crate::rig::Mesh;

/// Tolerance on barycentric bounds and on the minimum hit distance.
pub const RAY_EPS: f64 = 1e-9;

/// Ray–triangle hit along a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub face: usize,
    /// `true` when the face normal points along the ray (the ray exits the surface).
    pub exiting: bool,
}

/// Möller–Trumbore intersection. Returns the ray parameter of the hit; rays
/// exactly parallel to the triangle plane never intersect.
pub fn ray_triangle(origin: Vec3, dir: Vec3, tri: [Vec3; 3]) -> Option<f64> {
    let e1 = geom::sub(tri[1], tri[0]);
    let e2 = geom::sub(tri[2], tri[0]);
    let p = geom::cross(dir, e2);
    let det = geom::dot(e1, p);
    if det == 0.0 {
        return None;
    }
    let inv = 1.0 / det;
    let s = geom::sub(origin, tri[0]);
    let u = geom::dot(s, p) * inv;
    if !(-RAY_EPS..=1.0 + RAY_EPS).contains(&u) {
        return None;
    }
    let q = geom::cross(s, e1);
    let v = geom::dot(dir, q) * inv;
    if v < -RAY_EPS || u + v > 1.0 + RAY_EPS {
        return None;
    }
    let t = geom::dot(e2, q) * inv;
    (t > RAY_EPS).then_some(t)
}

/// All hits of the ray with `faces` of `mesh`, sorted by distance. Hits that
/// coincide in distance and orientation (a ray through a shared edge) are
/// reported once.
pub fn cast(mesh: &Mesh, faces: &[usize], origin: Vec3, dir: Vec3) -> Vec<Hit> {
    let mut hits: Vec<Hit> = faces
        .iter()
        .filter_map(|&f| {
            let tri = mesh.triangle(f);
            ray_triangle(origin, dir, tri).map(|t| {
                let n = geom::cross(geom::sub(tri[1], tri[0]), geom::sub(tri[2], tri[0]));
                Hit {
                    t,
                    face: f,
                    exiting: geom::dot(n, dir) > 0.0,
                }
            })
        })
        .collect();
    hits.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut out: Vec<Hit> = Vec::with_capacity(hits.len());
    for h in hits {
        let dup = out
            .iter()
            .rev()
            .take_while(|o| h.t - o.t < RAY_EPS)
            .any(|o| o.exiting == h.exiting);
        if !dup {
            out.push(h);
        }
    }
    out
}
