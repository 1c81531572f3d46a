mod common;

use common::{rig, shape, sparse_face};
use emogen_core::collision::{
    correct_face, corrective_cost, detect_collisions, detected_types, is_colliding,
    quantify_depth, sample_anchors, solve_correctives, CollisionConstraint, CorrectionParams,
    Scenario,
};
use emogen_core::rig::{AnchorRegion, AnchorSet, CollisionKind, Mesh, WeightVector};
use emogen_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const W1: f64 = 0.98;

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Winding number of a closed triangle surface around `p`, summed from the
/// signed solid angles of the tetrahedra spanned by `p` and each face.
fn winding_number(mesh: &Mesh, faces: &[usize], p: [f64; 3]) -> f64 {
    let total: f64 = faces
        .iter()
        .map(|&f| {
            let [i, j, k] = mesh.faces[f];
            let a = sub(mesh.vertices[i], p);
            let b = sub(mesh.vertices[j], p);
            let c = sub(mesh.vertices[k], p);
            let (la, lb, lc) = (norm(a), norm(b), norm(c));
            let num = dot(a, cross(b, c));
            let den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
            2.0 * num.atan2(den)
        })
        .sum();
    total / (4.0 * std::f64::consts::PI)
}

fn with(entries: &[(&str, f64)]) -> WeightVector {
    let rig = rig();
    let mut w = rig.zeros();
    for &(name, v) in entries {
        w[shape(name)] = v;
    }
    rig.complete(&w)
}

fn lip_row(coeffs: [f64; 8], depth: f64) -> CollisionConstraint {
    CollisionConstraint {
        kind: if coeffs[..4].iter().any(|&c| c != 0.0) {
            CollisionKind::Lip
        } else {
            CollisionKind::Teeth
        },
        anchor: 0,
        hit_face: 0,
        scenario: Scenario::Within,
        depth,
        coeffs,
    }
}

#[test]
fn anchor_sampling_matches_barycentric_definition() {
    let rig = rig();
    let mesh = rig.neutral();
    let face = rig.collision().upper_lip.faces[0];
    let set = |c1: f64, c2: f64| AnchorSet {
        region: AnchorRegion::UpperLip,
        faces: vec![face],
        points: vec![(face, c1, c2).into()],
    };
    let [a, b, c] = mesh.faces[face].map(|i| mesh.vertices[i]);
    let centroid = sample_anchors(mesh, &set(1.0 / 3.0, 1.0 / 3.0))[0];
    for k in 0..3 {
        assert!((centroid[k] - (a[k] + b[k] + c[k]) / 3.0).abs() < 1e-12);
    }
    assert_eq!(sample_anchors(mesh, &set(1.0, 0.0))[0], a);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let normal = cross(sub(b, a), sub(c, a));
    let unit = normal.map(|v| v / norm(normal));
    for _ in 0..1000 {
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        let (c1, c2) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
        let p = sample_anchors(mesh, &set(c1, c2))[0];
        assert!(dot(sub(p, a), unit).abs() < 1e-9);
    }
}

#[test]
fn anchors_far_from_the_mouth_never_collide() {
    let rig = rig();
    let mut config = rig.collision().clone();
    let top = (0..rig.neutral().faces.len())
        .max_by(|&f, &g| {
            let z = |f: usize| rig.neutral().faces[f].map(|i| rig.neutral().vertices[i][2])[0];
            z(f).total_cmp(&z(g))
        })
        .unwrap();
    for set in [&mut config.upper_lip, &mut config.teeth] {
        set.faces = vec![top];
        set.points = vec![(top, 1.0 / 3.0, 1.0 / 3.0).into()];
    }
    let mesh = rig.evaluate(&with(&[("lower_lip_raise", 1.0), ("jaw_open", 1.0)])).unwrap();
    assert!(detect_collisions(&mesh, &config).is_empty());
}

#[test]
fn within_classification_agrees_with_winding_number() {
    let rig = rig();
    let config = rig.collision();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut inside_total = 0;
    for trial in 0..200 {
        let mut w = sparse_face(&mut rng, 4);
        if trial % 2 == 0 {
            w[shape("lower_lip_raise")] = rng.random_range(0.5..1.0);
        } else {
            w[shape("jaw_open")] = rng.random_range(0.3..1.0);
        }
        let mesh = rig.evaluate(&rig.complete(&w)).unwrap();
        let detections = detect_collisions(&mesh, config);
        for kind in CollisionKind::ALL {
            for (i, p) in sample_anchors(&mesh, config.probe_set(kind)).into_iter().enumerate() {
                let inside = winding_number(&mesh, &config.lower_lip.faces, p).abs() > 0.5;
                let within = detections
                    .iter()
                    .any(|d| d.kind == kind && d.anchor == i && d.scenario == Scenario::Within);
                assert_eq!(inside, within, "trial {trial} {kind:?} anchor {i}");
                inside_total += inside as usize;
            }
        }
    }
    assert!(inside_total > 100);
}

#[test]
fn raised_lower_lip_is_detected_within() {
    let rig = rig();
    let mesh = rig.evaluate(&with(&[("lower_lip_raise", 1.0)])).unwrap();
    let d = detect_collisions(&mesh, rig.collision());
    assert!(d.iter().any(|d| d.scenario == Scenario::Within && d.kind == CollisionKind::Lip));
}

#[test]
fn depth_matches_the_plane_gap() {
    // The raise translates the lower lip, so its top is a plane whose gap to
    // the flat underside of the upper lip is known in closed form.
    let rig = rig();
    let config = rig.collision();
    let raise = shape("lower_lip_raise");
    let lift = rig.shape(raise).offsets.iter().find(|(v, _)| {
        let f = config.lower_lip.faces[0];
        rig.neutral().faces[f].contains(v)
    });
    let dz = lift.unwrap().1[2];
    let lower_top = config
        .lower_lip
        .faces
        .iter()
        .flat_map(|&f| rig.neutral().faces[f])
        .map(|i| rig.neutral().vertices[i][2])
        .fold(f64::MIN, f64::max);
    for s in [0.6, 0.75, 0.9] {
        let mesh = rig.evaluate(&with(&[("lower_lip_raise", s)])).unwrap();
        let detections = detect_collisions(&mesh, config);
        let rows = quantify_depth(&rig, &detections);
        assert!(!rows.is_empty());
        let anchors = sample_anchors(&mesh, &config.upper_lip);
        for row in rows.iter().filter(|r| r.scenario == Scenario::Within) {
            let expected = lower_top + s * dz - anchors[row.anchor][2];
            assert!((row.depth - expected).abs() < 1e-6, "{} vs {expected}", row.depth);
            assert!(row.depth > 0.0);
        }
    }
}

#[test]
fn lip_only_collisions_zero_the_teeth_coefficients() {
    let rig = rig();
    let mesh = rig.evaluate(&with(&[("lower_lip_raise", 0.9)])).unwrap();
    let detections = detect_collisions(&mesh, rig.collision());
    assert_eq!(detected_types(&detections), [true, false]);
    let rows = quantify_depth(&rig, &detections);
    assert!(!rows.is_empty());
    for row in &rows {
        assert_eq!(row.kind, CollisionKind::Lip);
        assert!(row.coeffs[4..].iter().all(|&c| c == 0.0));
    }
}

#[test]
fn no_detections_give_no_constraints() {
    let rig = rig();
    assert!(quantify_depth(&rig, &[]).is_empty());
    assert!(matches!(solve_correctives(&[], W1), Err(Error::NoConstraints)));
}

#[test]
fn single_constraint_row_is_built_verbatim() {
    let row = lip_row([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.3);
    let out = solve_correctives(&[row], W1).unwrap();
    let expect = 0.98 * 0.3 / (0.98 + 0.02);
    assert!((out.w[0] - expect).abs() < 1e-12);
    assert!(out.w[1..].iter().all(|&v| v == 0.0));
}

fn grid_min_1d(a: f64, b: f64) -> f64 {
    (0..=100_000)
        .map(|i| i as f64 / 100_000.0)
        .map(|x| W1 * (a * x - b).powi(2) + (1.0 - W1) * x * x)
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn one_dimensional_ridge_matches_closed_form(
        a in -2.0..3.0f64,
        b in 0.01..2.0f64,
        col in 0usize..8,
    ) {
        let mut coeffs = [0.0; 8];
        coeffs[col] = a;
        let out = solve_correctives(&[lip_row(coeffs, b)], W1).unwrap();
        let closed = (W1 * a * b / (W1 * a * a + 0.02)).clamp(0.0, 1.0);
        prop_assert!((out.w[col] - closed).abs() < 1e-9);
        let cost = W1 * (a * out.w[col] - b).powi(2) + (1.0 - W1) * out.w[col].powi(2);
        prop_assert!(cost <= grid_min_1d(a, b) + 1e-12);
    }
}

/// Smallest cost over the 0.05 grid of [0, 1]^8. Columns absent from every
/// row only add regularization, so they sit at 0 and the search runs over
/// the used columns alone.
fn grid_min(rows: &[CollisionConstraint]) -> f64 {
    let used: Vec<usize> = (0..8).filter(|&j| rows.iter().any(|r| r.coeffs[j] != 0.0)).collect();
    let steps = 21usize;
    let total = steps.pow(used.len() as u32);
    let mut best = f64::INFINITY;
    let mut w = [0.0; 8];
    for mut code in 0..total {
        for &j in &used {
            w[j] = (code % steps) as f64 * 0.05;
            code /= steps;
        }
        best = best.min(corrective_cost(rows, &w, W1));
    }
    best
}

fn random_system(rng: &mut ChaCha8Rng, kind: CollisionKind) -> Vec<CollisionConstraint> {
    let m = rng.random_range(1..=6);
    let offset = kind.index() * 4;
    (0..m)
        .map(|_| {
            let mut coeffs = [0.0; 8];
            for c in &mut coeffs[offset..offset + 4] {
                *c = if rng.random_bool(0.25) { 0.0 } else { rng.random_range(-0.3..1.5) };
            }
            CollisionConstraint {
                kind,
                anchor: 0,
                hit_face: 0,
                scenario: Scenario::Within,
                depth: rng.random_range(0.01..1.2),
                coeffs,
            }
        })
        .collect()
}

#[test]
fn solver_beats_the_exhaustive_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..60 {
        let kind = CollisionKind::ALL[i % 2];
        let rows = random_system(&mut rng, kind);
        let out = solve_correctives(&rows, W1).unwrap();
        assert!(out.w.iter().all(|v| (0.0..=1.0).contains(v)));
        let grid = grid_min(&rows);
        assert!(out.cost <= grid + 1e-6, "system {i}: {} > {grid}", out.cost);
    }
}

#[test]
fn mixed_systems_solve_each_pass_optimally() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let lip = random_system(&mut rng, CollisionKind::Lip);
        let mut teeth = random_system(&mut rng, CollisionKind::Teeth);
        for row in &mut teeth {
            for c in &mut row.coeffs[..4] {
                *c = rng.random_range(-0.2..0.2);
            }
        }
        let rows: Vec<_> = lip.iter().chain(&teeth).cloned().collect();
        let out = solve_correctives(&rows, W1).unwrap();
        assert_eq!(out.passes.len(), 2);
        assert_eq!(out.passes[0].kind, Some(CollisionKind::Lip));
        assert_eq!(out.passes[1].kind, Some(CollisionKind::Teeth));
        let m = rows.len() as f64;
        // Teeth pass: lip weights fixed from the first pass, teeth rows only.
        let fixed = out.passes[0].w;
        let mut best = f64::INFINITY;
        let mut w = fixed;
        for code in 0..21usize.pow(4) {
            let mut c = code;
            for j in 4..8 {
                w[j] = (c % 21) as f64 * 0.05;
                c /= 21;
            }
            let data: f64 = teeth
                .iter()
                .map(|r| (r.coeffs.iter().zip(&w).map(|(a, x)| a * x).sum::<f64>() - r.depth).powi(2))
                .sum();
            let reg: f64 = w[4..].iter().map(|x| x * x).sum();
            best = best.min(W1 * data + (1.0 - W1) * m * reg);
        }
        assert!(out.passes[1].cost <= best + 1e-6);
        assert_eq!(out.cost, corrective_cost(&rows, &out.w, W1));
    }
}

#[test]
fn collision_free_faces_are_untouched() {
    let rig = rig();
    let w = with(&[("brow_raise_L", 0.8), ("smile_L", 0.3)]);
    assert!(!is_colliding(&detect_collisions(&rig.evaluate(&w).unwrap(), rig.collision())));
    let (out, result) = correct_face(&rig, &w, &CorrectionParams::default()).unwrap();
    assert_eq!(out, w);
    assert_eq!(result.iterations, 0);
    assert_eq!(result.w_clsn, [0.0; 8]);
}

#[test]
fn forced_lip_collision_uses_only_lip_correctives() {
    let rig = rig();
    let w = with(&[("lower_lip_raise", 0.9)]);
    let (out, result) = correct_face(&rig, &w, &CorrectionParams::default()).unwrap();
    assert!(result.w_clsn[..4].iter().any(|&v| v > 0.0));
    assert!(result.w_clsn[4..].iter().all(|&v| v == 0.0));
    assert!(!result.unresolved);
    assert!(!is_colliding(&detect_collisions(&rig.evaluate(&out).unwrap(), rig.collision())));
}

#[test]
fn random_colliding_faces_are_repaired_or_flagged() {
    let rig = rig();
    let columns = *rig.collision_columns();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut colliding, mut unresolved) = (0, 0);
    for _ in 0..300 {
        let w = sparse_face(&mut rng, 6);
        let (out, result) = correct_face(&rig, &w, &CorrectionParams::default()).unwrap();
        for i in 0..rig.shape_count() {
            if !columns.contains(&i) {
                assert_eq!(out[i], w[i]);
            }
        }
        assert!(result.w_clsn.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(result.constraints_after <= result.constraints_before);
        let still = is_colliding(&detect_collisions(&rig.evaluate(&out).unwrap(), rig.collision()));
        assert_eq!(still, result.unresolved);
        if result.constraints_before > 0 {
            colliding += 1;
            assert!(result.constraints_after == 0 || result.unresolved);
        }
        unresolved += result.unresolved as usize;
    }
    assert!(colliding >= 50, "only {colliding} colliding faces");
    assert!(unresolved * 50 < colliding.max(1), "{unresolved} of {colliding} unresolved");
}

#[test]
fn one_pass_does_not_increase_within_anchors() {
    let rig = rig();
    let config = rig.collision();
    let params = CorrectionParams {
        max_iters: 1,
        ..CorrectionParams::default()
    };
    let count = |w: &WeightVector| {
        detect_collisions(&rig.evaluate(w).unwrap(), config)
            .iter()
            .filter(|d| d.scenario == Scenario::Within)
            .count()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut before, mut after) = (0, 0);
    for _ in 0..500 {
        let w = sparse_face(&mut rng, 6);
        let (out, _) = correct_face(&rig, &w, &params).unwrap();
        before += count(&w);
        after += count(&out);
    }
    assert!(before > 0);
    assert!(after <= before, "{after} > {before}");
}

#[test]
fn diagnostics_record_each_pass() {
    let rig = rig();
    let w = with(&[("lower_lip_raise", 0.9), ("jaw_open", 0.2)]);
    let params = CorrectionParams {
        diagnostics: true,
        ..CorrectionParams::default()
    };
    let (_, result) = correct_face(&rig, &w, &params).unwrap();
    assert_eq!(result.diagnostics.len(), result.iterations);
    assert!(result.iterations >= 1);
    assert!(!result.diagnostics[0].constraints.is_empty());
}
