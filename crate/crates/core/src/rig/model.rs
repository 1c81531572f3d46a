use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::geom::{self, Vec3};
use super::mesh::Mesh;
use super::weights::WeightVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emotion {
    Happy,
    Sad,
    Angry,
    Fearful,
}

impl Emotion {
    pub const ALL: [Emotion; 4] = [Emotion::Happy, Emotion::Sad, Emotion::Angry, Emotion::Fearful];
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Emotion::Happy => "happy",
            Emotion::Sad => "sad",
            Emotion::Angry => "angry",
            Emotion::Fearful => "fearful",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionKind {
    Lip,
    Teeth,
}

impl CollisionKind {
    pub const ALL: [CollisionKind; 2] = [CollisionKind::Lip, CollisionKind::Teeth];

    pub fn index(self) -> usize {
        match self {
            CollisionKind::Lip => 0,
            CollisionKind::Teeth => 1,
        }
    }
}

/// Lateral zone of a collision corrective, ordered from character left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Zone {
    OuterLeft,
    InnerLeft,
    InnerRight,
    OuterRight,
}

impl Zone {
    pub const ALL: [Zone; 4] = [Zone::OuterLeft, Zone::InnerLeft, Zone::InnerRight, Zone::OuterRight];

    pub fn index(self) -> usize {
        match self {
            Zone::OuterLeft => 0,
            Zone::InnerLeft => 1,
            Zone::InnerRight => 2,
            Zone::OuterRight => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    Core,
    Combinational { drivers: Vec<usize> },
    Collision { collision: CollisionKind, zone: Zone },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapeTags {
    pub eye: bool,
    pub pupil: bool,
    pub head: bool,
    pub lip_seal: bool,
    pub disabled: bool,
}

/// One blendshape: a sparse displacement field from the neutral mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub name: String,
    #[serde(flatten)]
    pub kind: ShapeKind,
    #[serde(default)]
    pub tags: ShapeTags,
    /// `(vertex, displacement)` pairs sorted by vertex index.
    pub offsets: Vec<(usize, Vec3)>,
}

impl Shape {
    pub fn new(name: impl Into<String>, kind: ShapeKind, offsets: Vec<(usize, Vec3)>) -> Self {
        let mut offsets: Vec<_> = offsets.into_iter().filter(|(_, d)| *d != [0.0; 3]).collect();
        offsets.sort_by_key(|(v, _)| *v);
        Shape {
            name: name.into(),
            kind,
            tags: ShapeTags::default(),
            offsets,
        }
    }

    pub fn with_tags(mut self, tags: ShapeTags) -> Self {
        self.tags = tags;
        self
    }

    pub fn is_core(&self) -> bool {
        matches!(self.kind, ShapeKind::Core)
    }

    pub fn offset_at(&self, vertex: usize) -> Vec3 {
        match self.offsets.binary_search_by_key(&vertex, |(v, _)| *v) {
            Ok(i) => self.offsets[i].1,
            Err(_) => [0.0; 3],
        }
    }

    /// Full displacement field over `n` vertices.
    pub fn dense_offsets(&self, n: usize) -> Vec<Vec3> {
        let mut out = vec![[0.0; 3]; n];
        for &(v, d) in &self.offsets {
            out[v] = d;
        }
        out
    }
}

/// Barycentric surface point `(face, c1, c2)`, serialized as a triplet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, f64, f64)", into = "(usize, f64, f64)")]
pub struct Anchor {
    pub face: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Anchor {
    pub fn centroid(face: usize) -> Self {
        Anchor {
            face,
            c1: 1.0 / 3.0,
            c2: 1.0 / 3.0,
        }
    }
}

impl From<(usize, f64, f64)> for Anchor {
    fn from((face, c1, c2): (usize, f64, f64)) -> Self {
        Anchor { face, c1, c2 }
    }
}

impl From<Anchor> for (usize, f64, f64) {
    fn from(a: Anchor) -> Self {
        (a.face, a.c1, a.c2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnchorRegion {
    #[serde(rename = "teeth")]
    Teeth,
    #[serde(rename = "upr_lip")]
    UpperLip,
    #[serde(rename = "lwr_lip")]
    LowerLip,
}

/// Region face subset plus the anchor points sampled on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorSet {
    pub region: AnchorRegion,
    pub faces: Vec<usize>,
    pub points: Vec<Anchor>,
}

impl AnchorSet {
    pub fn validate(&self, face_count: usize) -> Result<()> {
        if let Some(f) = self.faces.iter().find(|&&f| f >= face_count) {
            return Err(Error::invalid(format!(
                "{:?} region references face {f} of {face_count}",
                self.region
            )));
        }
        for (i, a) in self.points.iter().enumerate() {
            let ok = a.c1 >= 0.0 && a.c2 >= 0.0 && a.c1 + a.c2 <= 1.0 + 1e-12;
            if !ok {
                return Err(Error::invalid(format!(
                    "{:?} anchor {i} has barycentrics ({}, {})",
                    self.region, a.c1, a.c2
                )));
            }
            if !self.faces.contains(&a.face) {
                return Err(Error::invalid(format!(
                    "{:?} anchor {i} lies on face {} outside the region",
                    self.region, a.face
                )));
            }
        }
        Ok(())
    }
}

/// Anchor regions and the positive collision directions. Each direction is
/// the motion of the lower lip in the matching corrective mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionConfig {
    pub teeth: AnchorSet,
    pub upper_lip: AnchorSet,
    pub lower_lip: AnchorSet,
    pub lip_direction: Vec3,
    pub teeth_direction: Vec3,
}

impl CollisionConfig {
    pub fn direction(&self, kind: CollisionKind) -> Vec3 {
        match kind {
            CollisionKind::Lip => self.lip_direction,
            CollisionKind::Teeth => self.teeth_direction,
        }
    }

    /// Anchor set whose points are tested against the lower lip for `kind`.
    pub fn probe_set(&self, kind: CollisionKind) -> &AnchorSet {
        match kind {
            CollisionKind::Lip => &self.upper_lip,
            CollisionKind::Teeth => &self.teeth,
        }
    }
}

/// Plain rig content as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigData {
    pub id: String,
    pub neutral: Mesh,
    pub shapes: Vec<Shape>,
    pub symmetry_pairs: Vec<(usize, usize)>,
    pub emotion_subsets: BTreeMap<Emotion, Vec<usize>>,
    pub collision: CollisionConfig,
}

/// Validated, immutable blendshape rig.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendshapeRig {
    data: RigData,
    leader: Vec<usize>,
    unique_cores: Vec<usize>,
    combinationals: Vec<usize>,
    collision_columns: [usize; 8],
}

impl BlendshapeRig {
    pub fn new(data: RigData) -> Result<Self> {
        let collision_columns = validate(&data)?;
        let n = data.shapes.len();
        let mut leader: Vec<usize> = (0..n).collect();
        let mut is_right = vec![false; n];
        for &(l, r) in &data.symmetry_pairs {
            leader[r] = l;
            is_right[r] = true;
        }
        let unique_cores = data
            .shapes
            .iter()
            .enumerate()
            .filter(|(i, s)| {
                s.is_core() && !is_right[*i] && !s.tags.head && !s.tags.lip_seal && !s.tags.disabled
            })
            .map(|(i, _)| i)
            .collect();
        let combinationals = data
            .shapes
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s.kind, ShapeKind::Combinational { .. }))
            .map(|(i, _)| i)
            .collect();
        Ok(BlendshapeRig {
            data,
            leader,
            unique_cores,
            combinationals,
            collision_columns,
        })
    }

    pub fn data(&self) -> &RigData {
        &self.data
    }

    pub fn into_data(self) -> RigData {
        self.data
    }

    pub fn id(&self) -> &str {
        &self.data.id
    }

    pub fn neutral(&self) -> &Mesh {
        &self.data.neutral
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.data.shapes
    }

    pub fn shape(&self, index: usize) -> &Shape {
        &self.data.shapes[index]
    }

    pub fn shape_count(&self) -> usize {
        self.data.shapes.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.data.neutral.vertices.len()
    }

    pub fn shape_index(&self, name: &str) -> Option<usize> {
        self.data.shapes.iter().position(|s| s.name == name)
    }

    pub fn symmetry_pairs(&self) -> &[(usize, usize)] {
        &self.data.symmetry_pairs
    }

    pub fn emotion_subsets(&self) -> &BTreeMap<Emotion, Vec<usize>> {
        &self.data.emotion_subsets
    }

    pub fn collision(&self) -> &CollisionConfig {
        &self.data.collision
    }

    /// The authoritative member for `shape`: its left partner when it is the
    /// right member of a symmetry pair, itself otherwise.
    pub fn leader(&self, shape: usize) -> usize {
        self.leader[shape]
    }

    /// Core shapes compared by the blendshape-domain metrics and evolved by
    /// the GA: no right pair members, correctives, head, lip-seal or disabled
    /// shapes.
    pub fn unique_core_indices(&self) -> &[usize] {
        &self.unique_cores
    }

    pub fn combinational_indices(&self) -> &[usize] {
        &self.combinationals
    }

    /// Shape indices of the collision correctives in solver column order:
    /// lip zones outer-left to outer-right, then teeth zones.
    pub fn collision_columns(&self) -> &[usize; 8] {
        &self.collision_columns
    }

    pub fn zeros(&self) -> WeightVector {
        WeightVector::zeros(self.shape_count())
    }

    pub fn check_weights(&self, w: &WeightVector) -> Result<()> {
        if w.len() != self.shape_count() {
            return Err(Error::DimensionMismatch {
                expected: self.shape_count(),
                actual: w.len(),
            });
        }
        Ok(())
    }

    /// Reduces a full weight vector to its unique-core entries.
    pub fn reduce(&self, w: &WeightVector) -> Vec<f64> {
        self.unique_cores.iter().map(|&i| w[i]).collect()
    }

    pub fn evaluate(&self, w: &WeightVector) -> Result<Mesh> {
        Ok(Mesh {
            vertices: self.evaluate_vertices(w)?,
            faces: self.data.neutral.faces.clone(),
        })
    }

    pub fn evaluate_vertices(&self, w: &WeightVector) -> Result<Vec<Vec3>> {
        let mut out = self.data.neutral.vertices.clone();
        self.accumulate_offsets(w, &mut out)?;
        Ok(out)
    }

    /// Per-vertex displacement of the expression from the neutral.
    pub fn offset_field(&self, w: &WeightVector) -> Result<Vec<Vec3>> {
        let mut out = vec![[0.0; 3]; self.vertex_count()];
        self.accumulate_offsets(w, &mut out)?;
        Ok(out)
    }

    fn accumulate_offsets(&self, w: &WeightVector, out: &mut [Vec3]) -> Result<()> {
        self.check_weights(w)?;
        for (shape, &a) in self.data.shapes.iter().zip(w.iter()) {
            if a == 0.0 {
                continue;
            }
            for &(v, d) in &shape.offsets {
                let p = &mut out[v];
                p[0] += a * d[0];
                p[1] += a * d[1];
                p[2] += a * d[2];
            }
        }
        Ok(())
    }

    /// Displacement of shape `shape` at a barycentric surface point.
    pub fn shape_delta_at(&self, shape: usize, anchor: Anchor) -> Vec3 {
        let s = &self.data.shapes[shape];
        let [a, b, c] = self.data.neutral.faces[anchor.face];
        let c3 = 1.0 - anchor.c1 - anchor.c2;
        geom::add(
            geom::add(
                geom::scale(s.offset_at(a), anchor.c1),
                geom::scale(s.offset_at(b), anchor.c2),
            ),
            geom::scale(s.offset_at(c), c3),
        )
    }

    /// Copies each pair leader's weight onto its right member.
    pub fn enforce_symmetry(&self, w: &WeightVector) -> WeightVector {
        let mut out = w.clone();
        for &(l, r) in &self.data.symmetry_pairs {
            out[r] = out[l];
        }
        out
    }

    /// Sets every combinational corrective to the product of its drivers'
    /// weights. Drivers are read through their symmetry leader so the result
    /// does not depend on whether symmetry was enforced first.
    pub fn apply_combinational(&self, w: &WeightVector) -> WeightVector {
        let mut out = w.clone();
        for &c in &self.combinationals {
            if let ShapeKind::Combinational { drivers } = &self.data.shapes[c].kind {
                out[c] = drivers.iter().map(|&d| w[self.leader[d]]).product();
            }
        }
        out
    }

    /// Symmetry followed by combinational activation.
    pub fn complete(&self, w: &WeightVector) -> WeightVector {
        self.apply_combinational(&self.enforce_symmetry(w))
    }
}

/// Checks every structural invariant; returns the collision column map.
fn validate(data: &RigData) -> Result<[usize; 8]> {
    data.neutral.validate()?;
    let n = data.neutral.vertices.len();
    let k = data.shapes.len();
    for (i, s) in data.shapes.iter().enumerate() {
        if let Some((v, _)) = s.offsets.iter().find(|(v, _)| *v >= n) {
            return Err(Error::invalid(format!(
                "shape {i} ({}) offsets vertex {v} but the neutral has {n}",
                s.name
            )));
        }
        if s.offsets.windows(2).any(|p| p[0].0 >= p[1].0) {
            return Err(Error::invalid(format!(
                "shape {i} ({}) offsets are not strictly sorted by vertex",
                s.name
            )));
        }
        if s.offsets.iter().flat_map(|(_, d)| d).any(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("shape {i} has non-finite offsets")));
        }
        if let ShapeKind::Combinational { drivers } = &s.kind {
            if drivers.len() < 2 {
                return Err(Error::invalid(format!(
                    "combinational shape {i} ({}) needs at least two drivers",
                    s.name
                )));
            }
            for &d in drivers {
                if d >= k || !data.shapes[d].is_core() {
                    return Err(Error::invalid(format!(
                        "combinational shape {i} driver {d} is not a core shape"
                    )));
                }
            }
        }
    }

    let mut paired = vec![false; k];
    for &(l, r) in &data.symmetry_pairs {
        for m in [l, r] {
            if m >= k {
                return Err(Error::invalid(format!("symmetry pair member {m} out of range")));
            }
            if paired[m] {
                return Err(Error::invalid(format!("shape {m} appears in two symmetry pairs")));
            }
            if !data.shapes[m].is_core() {
                return Err(Error::invalid(format!("symmetry pair member {m} is not a core shape")));
            }
            paired[m] = true;
        }
        if l == r {
            return Err(Error::invalid(format!("shape {l} paired with itself")));
        }
    }

    for e in Emotion::ALL {
        let subset = data
            .emotion_subsets
            .get(&e)
            .ok_or_else(|| Error::Config(format!("missing emotion subset '{e}'")))?;
        if subset.is_empty() {
            return Err(Error::Config(format!("emotion subset '{e}' is empty")));
        }
        if let Some(&i) = subset.iter().find(|&&i| i >= k || !data.shapes[i].is_core()) {
            return Err(Error::invalid(format!(
                "emotion subset '{e}' contains non-core shape {i}"
            )));
        }
    }

    let mut columns = [usize::MAX; 8];
    for (i, s) in data.shapes.iter().enumerate() {
        if let ShapeKind::Collision { collision, zone } = s.kind {
            let col = collision.index() * 4 + zone.index();
            if columns[col] != usize::MAX {
                return Err(Error::invalid(format!(
                    "duplicate {collision:?} collision shape for zone {zone:?}"
                )));
            }
            columns[col] = i;
        }
    }
    if columns.contains(&usize::MAX) {
        return Err(Error::invalid(
            "rig needs exactly four lip and four teeth collision shapes, one per zone",
        ));
    }

    let faces = data.neutral.faces.len();
    let c = &data.collision;
    for (set, region) in [
        (&c.teeth, AnchorRegion::Teeth),
        (&c.upper_lip, AnchorRegion::UpperLip),
        (&c.lower_lip, AnchorRegion::LowerLip),
    ] {
        if set.region != region {
            return Err(Error::invalid(format!(
                "anchor set labelled {:?} stored as {region:?}",
                set.region
            )));
        }
        set.validate(faces)?;
    }
    for d in [c.lip_direction, c.teeth_direction] {
        if (geom::norm(d) - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("collision direction {d:?} is not unit length")));
        }
    }
    Ok(columns)
}
