//! Procedural low-poly face used in place of an artist-sculpted rig.
//!
//! Layout: `x` is lateral (positive towards the character's left), `y` points
//! out of the face and `z` up. The mesh is a height-field skin patch, two
//! eyeballs, closed upper and lower lip volumes and an upper-teeth block.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geom::{self, Vec3};
use super::mesh::Mesh;
use super::model::{
    Anchor, AnchorRegion, AnchorSet, BlendshapeRig, CollisionConfig, CollisionKind, Emotion,
    RigData, Shape, ShapeKind, ShapeTags, Zone,
};
use crate::{Error, Result};

/// Smallest core count that still yields every required shape family.
pub const MIN_CORE_SHAPES: usize = 12;

const MOUTH: Vec3 = [0.0, 3.4, -4.0];
const LIP_HALF_WIDTH: f64 = 2.0;
const ZONE_CENTERS: [f64; 4] = [1.5, 0.5, -0.5, -1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RigGenParams {
    /// Skin cells per side; the skin patch has `(grid + 1)^2` vertices.
    pub grid: usize,
    pub core_count: usize,
    pub seed: u64,
}

impl Default for RigGenParams {
    fn default() -> Self {
        RigGenParams {
            grid: 16,
            core_count: 40,
            seed: 7,
        }
    }
}

#[derive(Clone, Copy)]
enum Part {
    Skin,
    EyeLeft,
    EyeRight,
    UpperLip,
    LowerLip,
    Teeth,
}

/// Vertex displacement rule evaluated at each rest position of a part.
type Field<'a> = Box<dyn Fn(Vec3) -> Vec3 + 'a>;

struct Builder {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    parts: Vec<(Part, std::ops::Range<usize>)>,
}

impl Builder {
    fn push(&mut self, part: Part, vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> (usize, usize) {
        let v0 = self.vertices.len();
        let f0 = self.faces.len();
        self.parts.push((part, v0..v0 + vertices.len()));
        self.vertices.extend(vertices);
        self.faces
            .extend(faces.into_iter().map(|[a, b, c]| [a + v0, b + v0, c + v0]));
        (v0, f0)
    }

    fn offsets(&self, fields: &[(Part, &Field<'_>)]) -> Vec<(usize, Vec3)> {
        let mut out = Vec::new();
        for (part, range) in &self.parts {
            for (p, field) in fields {
                if std::mem::discriminant(p) != std::mem::discriminant(part) {
                    continue;
                }
                for v in range.clone() {
                    let d = field(self.vertices[v]);
                    if geom::norm(d) > 1e-4 {
                        out.push((v, d));
                    }
                }
            }
        }
        merge(out)
    }
}

fn merge(mut offsets: Vec<(usize, Vec3)>) -> Vec<(usize, Vec3)> {
    offsets.sort_by_key(|(v, _)| *v);
    let mut out: Vec<(usize, Vec3)> = Vec::with_capacity(offsets.len());
    for (v, d) in offsets {
        match out.last_mut() {
            Some((last, acc)) if *last == v => *acc = geom::add(*acc, d),
            _ => out.push((v, d)),
        }
    }
    out
}

/// Closed axis-aligned box with a lattice of `n` cells per axis, outward
/// wound. Returns the vertices, faces and for every face `(axis, max_side,
/// u_cell, v_cell)` where `u`, `v` are the two other axes in cyclic order.
#[allow(clippy::type_complexity)]
fn lattice_box(
    min: Vec3,
    max: Vec3,
    n: [usize; 3],
) -> (Vec<Vec3>, Vec<[usize; 3]>, Vec<(usize, bool, usize, usize)>) {
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut id = |ijk: [usize; 3], vertices: &mut Vec<Vec3>| -> usize {
        *index.entry(ijk).or_insert_with(|| {
            let p = std::array::from_fn(|a| min[a] + (max[a] - min[a]) * ijk[a] as f64 / n[a] as f64);
            vertices.push(p);
            vertices.len() - 1
        })
    };
    let mut faces = Vec::new();
    let mut meta = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for max_side in [false, true] {
            for i in 0..n[u] {
                for j in 0..n[v] {
                    let corner = |di: usize, dj: usize| {
                        let mut ijk = [0; 3];
                        ijk[axis] = if max_side { n[axis] } else { 0 };
                        ijk[u] = i + di;
                        ijk[v] = j + dj;
                        ijk
                    };
                    let p00 = id(corner(0, 0), &mut vertices);
                    let p10 = id(corner(1, 0), &mut vertices);
                    let p11 = id(corner(1, 1), &mut vertices);
                    let p01 = id(corner(0, 1), &mut vertices);
                    if max_side {
                        faces.push([p00, p10, p11]);
                        faces.push([p00, p11, p01]);
                    } else {
                        faces.push([p00, p11, p10]);
                        faces.push([p00, p01, p11]);
                    }
                    meta.push((axis, max_side, i, j));
                    meta.push((axis, max_side, i, j));
                }
            }
        }
    }
    (vertices, faces, meta)
}

fn octahedron(center: Vec3, r: f64) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let v = vec![
        geom::add(center, [r, 0.0, 0.0]),
        geom::add(center, [-r, 0.0, 0.0]),
        geom::add(center, [0.0, r, 0.0]),
        geom::add(center, [0.0, -r, 0.0]),
        geom::add(center, [0.0, 0.0, r]),
        geom::add(center, [0.0, 0.0, -r]),
    ];
    let f = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    (v, f)
}

fn gauss(p: Vec3, cx: f64, cz: f64, sigma: f64) -> f64 {
    let d2 = (p[0] - cx).powi(2) + (p[2] - cz).powi(2);
    let g = (-d2 / (2.0 * sigma * sigma)).exp();
    if g < 1e-3 {
        0.0
    } else {
        g
    }
}

/// Lateral weight of a collision zone at lip-relative `x`; the four zones
/// form a partition of unity across the lips.
fn zone_weight(zone: Zone, x: f64) -> f64 {
    let c = ZONE_CENTERS[zone.index()];
    match zone {
        Zone::OuterLeft if x >= c => 1.0,
        Zone::OuterRight if x <= c => 1.0,
        _ => (1.0 - (x - c).abs()).max(0.0),
    }
}

/// How far a lip-relative point sits towards one mouth corner (0 centre, 1 corner).
fn corner_weight(x: f64, side: f64) -> f64 {
    ((x * side) / LIP_HALF_WIDTH).clamp(0.0, 1.0).powi(2)
}

fn skin_height(x: f64, z: f64) -> f64 {
    let nose = 0.9 * (-(x * x + (z - 0.5).powi(2)) / 1.5).exp();
    2.6 - 0.04 * x * x - 0.006 * (z + 1.0).powi(2) + nose
}

struct ShapeDef<'a> {
    name: String,
    fields: Vec<(Part, Field<'a>)>,
    tags: ShapeTags,
}

fn def<'a>(name: impl Into<String>, fields: Vec<(Part, Field<'a>)>) -> ShapeDef<'a> {
    ShapeDef {
        name: name.into(),
        fields,
        tags: ShapeTags::default(),
    }
}

fn skin(f: impl Fn(Vec3) -> Vec3 + 'static) -> (Part, Field<'static>) {
    (Part::Skin, Box::new(f))
}

fn lip(part: Part, f: impl Fn(Vec3) -> Vec3 + 'static) -> (Part, Field<'static>) {
    (part, Box::new(move |p: Vec3| f(geom::sub(p, MOUTH))))
}

/// Mirrored pair of skin bumps: `side` is +1 for the left member, -1 for the right.
fn bump(cx: f64, cz: f64, sigma: f64, d: Vec3, side: f64) -> (Part, Field<'static>) {
    skin(move |p| geom::scale([d[0] * side, d[1], d[2]], gauss(p, cx * side, cz, sigma)))
}

/// Named core shapes in library order; a `(left, right)` entry is a mirrored pair.
fn core_library() -> Vec<(ShapeDef<'static>, Option<ShapeDef<'static>>)> {
    let pair = |name: &str, make: &dyn Fn(f64) -> Vec<(Part, Field<'static>)>| {
        (
            def(format!("{name}_L"), make(1.0)),
            Some(def(format!("{name}_R"), make(-1.0))),
        )
    };
    let single = |d: ShapeDef<'static>| (d, None);
    let tagged = |mut d: ShapeDef<'static>, tags: ShapeTags| {
        d.tags = tags;
        d
    };

    let mut lib = vec![
        pair("brow_raise", &|s| vec![bump(2.8, 4.2, 1.6, [0.0, 0.1, 0.8], s)]),
        pair("smile", &|s| {
            vec![
                bump(2.4, -3.6, 1.3, [0.35, 0.1, 0.5], s),
                lip(Part::UpperLip, move |q| [0.25 * s * corner_weight(q[0], s), 0.0, 0.35 * corner_weight(q[0], s)]),
                lip(Part::LowerLip, move |q| [0.25 * s * corner_weight(q[0], s), 0.0, 0.35 * corner_weight(q[0], s)]),
            ]
        }),
        pair("frown", &|s| {
            vec![
                bump(2.4, -4.8, 1.3, [0.1, 0.0, -0.5], s),
                lip(Part::UpperLip, move |q| [0.0, 0.0, -0.25 * corner_weight(q[0], s)]),
                lip(Part::LowerLip, move |q| [0.0, 0.0, -0.25 * corner_weight(q[0], s)]),
            ]
        }),
        pair("nose_wrinkle", &|s| vec![bump(0.9, 0.3, 0.9, [0.0, 0.2, 0.4], s)]),
        (
            def(
                "jaw_open",
                vec![
                    skin(|p| {
                        let t = ((-4.3 - p[2]) / 2.0).clamp(0.0, 1.0);
                        [0.0, -0.4 * t, -1.5 * t]
                    }),
                    lip(Part::LowerLip, |_| [0.0, -0.65, -0.6]),
                ],
            ),
            None,
        ),
        single(def(
            "lip_press",
            vec![
                lip(Part::UpperLip, |_| [0.0, 0.0, -0.35]),
                lip(Part::LowerLip, |_| [0.0, 0.0, 0.35]),
                skin(|p| [0.0, 0.1 * gauss(p, 0.0, -4.0, 1.5), 0.0]),
            ],
        )),
        pair("brow_lower", &|s| vec![bump(2.2, 4.0, 1.4, [-0.25, 0.05, -0.6], s)]),
        pair("cheek_raise", &|s| vec![bump(3.4, -1.0, 1.5, [0.1, 0.3, 0.5], s)]),
        pair("eye_blink", &|s| vec![bump(3.0, 2.6, 0.9, [0.0, 0.05, -0.5], s)]),
        single(def(
            "lower_lip_raise",
            vec![
                lip(Part::LowerLip, |_| [0.0, 0.1, 0.4]),
                skin(|p| [0.0, 0.05, 0.3 * gauss(p, 0.0, -6.0, 1.5)]),
            ],
        )),
        single(def(
            "upper_lip_raise",
            vec![
                lip(Part::UpperLip, |_| [0.0, 0.05, 0.4]),
                skin(|p| [0.0, 0.0, 0.3 * gauss(p, 0.0, -2.4, 1.2)]),
            ],
        )),
        single(def(
            "lip_pucker",
            vec![
                lip(Part::UpperLip, |q| [-0.25 * q[0], 0.3, -0.1]),
                lip(Part::LowerLip, |q| [-0.25 * q[0], 0.3, 0.1]),
            ],
        )),
        single(def(
            "lower_lip_suck",
            vec![lip(Part::LowerLip, |q| [0.0, -0.4, 0.05 * (1.0 - (q[0] / LIP_HALF_WIDTH).powi(2))])],
        )),
        pair("mouth_stretch", &|s| {
            vec![
                bump(2.6, -4.2, 1.2, [0.4, 0.0, -0.2], s),
                lip(Part::UpperLip, move |q| [0.3 * s * corner_weight(q[0], s), 0.0, 0.0]),
                lip(Part::LowerLip, move |q| [0.3 * s * corner_weight(q[0], s), 0.0, 0.0]),
            ]
        }),
        single(tagged(
            def(
                "look_left",
                vec![
                    (Part::EyeLeft, Box::new(|_| [0.2, 0.0, 0.0]) as Field),
                    (Part::EyeRight, Box::new(|_| [0.2, 0.0, 0.0]) as Field),
                ],
            ),
            ShapeTags { pupil: true, ..Default::default() },
        )),
        single(tagged(
            def(
                "look_up",
                vec![
                    (Part::EyeLeft, Box::new(|_| [0.0, 0.0, 0.2]) as Field),
                    (Part::EyeRight, Box::new(|_| [0.0, 0.0, 0.2]) as Field),
                ],
            ),
            ShapeTags { pupil: true, ..Default::default() },
        )),
        single(tagged(
            def("head_turn", vec![skin(|p| [0.3, -0.02 * p[0], 0.0])]),
            ShapeTags { head: true, ..Default::default() },
        )),
        single(tagged(
            def(
                "lip_seal",
                vec![
                    lip(Part::UpperLip, |_| [0.0, 0.0, -0.2]),
                    lip(Part::LowerLip, |_| [0.0, 0.0, 0.2]),
                ],
            ),
            ShapeTags { lip_seal: true, ..Default::default() },
        )),
    ];
    for (l, r) in lib.iter_mut().filter(|(l, _)| l.name.starts_with("eye_blink")) {
        l.tags.eye = true;
        if let Some(r) = r {
            r.tags.eye = true;
        }
    }
    lib
}

/// Builds the deterministic synthetic rig for `params`.
pub fn generate_synthetic_rig(params: &RigGenParams) -> Result<BlendshapeRig> {
    if params.core_count < MIN_CORE_SHAPES {
        return Err(Error::invalid(format!(
            "core_count {} is below the minimum of {MIN_CORE_SHAPES}",
            params.core_count
        )));
    }
    if params.grid < 4 {
        return Err(Error::invalid(format!("grid {} is below the minimum of 4", params.grid)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut b = Builder {
        vertices: Vec::new(),
        faces: Vec::new(),
        parts: Vec::new(),
    };

    let g = params.grid;
    let (x0, x1, z0, z1) = (-6.0, 6.0, -10.0, 7.0);
    let mut skin_v = Vec::with_capacity((g + 1) * (g + 1));
    for j in 0..=g {
        for i in 0..=g {
            let x = x0 + (x1 - x0) * i as f64 / g as f64;
            let z = z0 + (z1 - z0) * j as f64 / g as f64;
            let jitter = rng.random_range(-0.03..0.03);
            skin_v.push([x, skin_height(x, z) + jitter, z]);
        }
    }
    let mut skin_f = Vec::with_capacity(2 * g * g);
    for j in 0..g {
        for i in 0..g {
            let a = j * (g + 1) + i;
            let (bb, c, d) = (a + 1, a + g + 2, a + g + 1);
            skin_f.push([a, bb, c]);
            skin_f.push([a, c, d]);
        }
    }
    b.push(Part::Skin, skin_v, skin_f);

    for (part, side) in [(Part::EyeLeft, 1.0), (Part::EyeRight, -1.0)] {
        let (v, f) = octahedron([3.0 * side, 2.4, 2.2], 0.6);
        b.push(part, v, f);
    }

    let lip_n = [8, 2, 2];
    let (v, f, upper_meta) = lattice_box(
        geom::add(MOUTH, [-LIP_HALF_WIDTH, -0.2, 0.1]),
        geom::add(MOUTH, [LIP_HALF_WIDTH, 0.6, 0.8]),
        lip_n,
    );
    let upper_faces = f.len();
    let (_, upper_f0) = b.push(Part::UpperLip, v, f);

    let (v, f, _) = lattice_box(
        geom::add(MOUTH, [-LIP_HALF_WIDTH, -0.2, -0.8]),
        geom::add(MOUTH, [LIP_HALF_WIDTH, 0.6, -0.1]),
        lip_n,
    );
    let lower_faces = f.len();
    let (_, lower_f0) = b.push(Part::LowerLip, v, f);

    let teeth_n = [8, 1, 5];
    let (v, f, teeth_meta) = lattice_box(
        geom::add(MOUTH, [-1.6, -0.65, -1.0]),
        geom::add(MOUTH, [1.6, -0.35, 0.9]),
        teeth_n,
    );
    let teeth_faces = f.len();
    let (_, teeth_f0) = b.push(Part::Teeth, v, f);

    let library = core_library();
    let mut cores: Vec<ShapeDef<'static>> = Vec::new();
    let mut pairs = Vec::new();
    for (l, r) in library {
        if cores.len() >= params.core_count {
            break;
        }
        cores.push(l);
        if let Some(r) = r {
            if cores.len() < params.core_count {
                pairs.push((cores.len() - 1, cores.len()));
                cores.push(r);
            }
        }
    }
    let mut aux = 0;
    while cores.len() < params.core_count {
        let cx = rng.random_range(0.8..5.0);
        let cz = rng.random_range(-8.5..5.5);
        let sigma = rng.random_range(0.9..1.8);
        let d = [
            rng.random_range(-0.4..0.4),
            rng.random_range(-0.3..0.5),
            rng.random_range(-0.8..0.8),
        ];
        if cores.len() + 1 < params.core_count {
            pairs.push((cores.len(), cores.len() + 1));
            cores.push(def(format!("aux{aux}_L"), vec![bump(cx, cz, sigma, d, 1.0)]));
            cores.push(def(format!("aux{aux}_R"), vec![bump(cx, cz, sigma, d, -1.0)]));
        } else {
            cores.push(def(format!("aux{aux}"), vec![bump(0.0, cz, sigma, [0.0, d[1], d[2]], 1.0)]));
        }
        aux += 1;
    }

    let mut shapes: Vec<Shape> = cores
        .iter()
        .map(|d| {
            let fields: Vec<_> = d.fields.iter().map(|(p, f)| (*p, f)).collect();
            Shape::new(d.name.clone(), ShapeKind::Core, b.offsets(&fields)).with_tags(d.tags)
        })
        .collect();
    let index: HashMap<String, usize> = shapes
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.clone(), i))
        .collect();

    let combos: Vec<(&str, Vec<&str>, Vec<(Part, Field<'static>)>)> = vec![
        ("smile_jaw_L", vec!["smile_L", "jaw_open"], vec![bump(2.2, -4.6, 1.0, [0.1, 0.15, 0.2], 1.0)]),
        ("smile_jaw_R", vec!["smile_R", "jaw_open"], vec![bump(2.2, -4.6, 1.0, [0.1, 0.15, 0.2], -1.0)]),
        (
            "press_raise",
            vec!["lip_press", "lower_lip_raise"],
            vec![
                lip(Part::UpperLip, |_| [0.0, 0.1, 0.0]),
                lip(Part::LowerLip, |_| [0.0, 0.1, 0.0]),
            ],
        ),
        ("brow_conflict_L", vec!["brow_raise_L", "brow_lower_L"], vec![bump(2.5, 4.1, 1.2, [0.0, 0.15, 0.1], 1.0)]),
        ("brow_conflict_R", vec!["brow_raise_R", "brow_lower_R"], vec![bump(2.5, 4.1, 1.2, [0.0, 0.15, 0.1], -1.0)]),
    ];
    for (name, drivers, fields) in combos {
        let Some(drivers) = drivers.iter().map(|d| index.get(*d).copied()).collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        let fields: Vec<_> = fields.iter().map(|(p, f)| (*p, f)).collect();
        shapes.push(Shape::new(name, ShapeKind::Combinational { drivers }, b.offsets(&fields)));
    }

    for kind in CollisionKind::ALL {
        for zone in Zone::ALL {
            let fields: Vec<(Part, Field<'static>)> = match kind {
                CollisionKind::Lip => vec![
                    lip(Part::UpperLip, move |q| [0.0, 0.0, 0.6 * zone_weight(zone, q[0])]),
                    lip(Part::LowerLip, move |q| {
                        let h = zone_weight(zone, q[0]);
                        [0.0, 0.1 * h, -0.6 * h]
                    }),
                ],
                CollisionKind::Teeth => vec![lip(Part::LowerLip, move |q| {
                    let h = zone_weight(zone, q[0]);
                    [0.0, 1.2 * h, -0.15 * h]
                })],
            };
            let fields: Vec<_> = fields.iter().map(|(p, f)| (*p, f)).collect();
            let name = format!("{}_{}", match kind {
                CollisionKind::Lip => "clsn_lip",
                CollisionKind::Teeth => "clsn_teeth",
            }, zone_suffix(zone));
            shapes.push(Shape::new(
                name,
                ShapeKind::Collision { collision: kind, zone },
                b.offsets(&fields),
            ));
        }
    }

    let upper_bottom: Vec<usize> = upper_meta
        .iter()
        .enumerate()
        .filter(|(_, &(axis, max_side, _, _))| axis == 2 && !max_side)
        .map(|(f, _)| upper_f0 + f)
        .collect();
    let teeth_front: Vec<usize> = teeth_meta
        .iter()
        .enumerate()
        .filter(|(_, &(axis, max_side, u, _))| axis == 1 && max_side && u < 2)
        .map(|(f, _)| teeth_f0 + f)
        .collect();
    let region = |faces: std::ops::Range<usize>, points: &[usize], region| AnchorSet {
        region,
        faces: faces.collect(),
        points: points.iter().map(|&f| Anchor::centroid(f)).collect(),
    };
    let lower_all: Vec<usize> = (lower_f0..lower_f0 + lower_faces).collect();
    let collision = CollisionConfig {
        teeth: region(teeth_f0..teeth_f0 + teeth_faces, &teeth_front, AnchorRegion::Teeth),
        upper_lip: region(upper_f0..upper_f0 + upper_faces, &upper_bottom, AnchorRegion::UpperLip),
        lower_lip: region(lower_f0..lower_f0 + lower_faces, &lower_all, AnchorRegion::LowerLip),
        lip_direction: [0.0, 0.0, -1.0],
        teeth_direction: [0.0, 1.0, 0.0],
    };

    let emotion_subsets = emotion_subsets(&index, aux);

    BlendshapeRig::new(RigData {
        id: format!("synthetic-g{}-k{}-s{}", params.grid, params.core_count, params.seed),
        neutral: Mesh::new(b.vertices, b.faces)?,
        shapes,
        symmetry_pairs: pairs,
        emotion_subsets,
        collision,
    })
}

fn zone_suffix(zone: Zone) -> &'static str {
    match zone {
        Zone::OuterLeft => "outer_L",
        Zone::InnerLeft => "inner_L",
        Zone::InnerRight => "inner_R",
        Zone::OuterRight => "outer_R",
    }
}

fn emotion_subsets(index: &HashMap<String, usize>, aux: usize) -> BTreeMap<Emotion, Vec<usize>> {
    let named: [(Emotion, &[&str]); 4] = [
        (
            Emotion::Happy,
            &["smile_L", "cheek_raise_L", "brow_raise_L", "jaw_open", "upper_lip_raise", "mouth_stretch_L"],
        ),
        (
            Emotion::Sad,
            &["frown_L", "brow_raise_L", "lower_lip_raise", "lip_press", "eye_blink_L", "brow_lower_L"],
        ),
        (
            Emotion::Angry,
            &["brow_lower_L", "nose_wrinkle_L", "lip_press", "upper_lip_raise", "jaw_open", "eye_blink_L"],
        ),
        (
            Emotion::Fearful,
            &["brow_raise_L", "mouth_stretch_L", "jaw_open", "lower_lip_suck", "frown_L"],
        ),
    ];
    let order = [Emotion::Fearful, Emotion::Happy, Emotion::Sad, Emotion::Angry];
    let mut out = BTreeMap::new();
    for (emotion, names) in named {
        let mut set: Vec<usize> = names.iter().filter_map(|n| index.get(*n).copied()).collect();
        for a in 0..aux {
            if order[a % 4] != emotion {
                continue;
            }
            let name = format!("aux{a}_L");
            if let Some(&i) = index.get(&name).or_else(|| index.get(&format!("aux{a}"))) {
                set.push(i);
            }
        }
        if set.is_empty() {
            set.push(index["jaw_open"]);
        }
        set.sort_unstable();
        set.dedup();
        out.insert(emotion, set);
    }
    out
}
