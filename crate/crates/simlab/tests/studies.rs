use std::sync::{Arc, OnceLock};

use emogen_core::evolution::{Engine, FixedSet, GaConfig, InitMode, Population, Provenance};
use emogen_core::metrics::{cd_weights, vertex_distance_field, vrtx_rms, MetricKind, MetricSuite};
use emogen_core::rig::{generate_synthetic_rig, BlendshapeRig, RigGenParams, WeightVector};
use emogen_simlab::export::{write_distribution_csv, write_kl_csv, write_separability_csv, write_summary_csv};
use emogen_simlab::studies::{activation_study, expected_target_bias, heatmap_field, pressure_variant, target_bias};
use emogen_simlab::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rig() -> Arc<BlendshapeRig> {
    static RIG: OnceLock<Arc<BlendshapeRig>> = OnceLock::new();
    RIG.get_or_init(|| Arc::new(generate_synthetic_rig(&RigGenParams::default()).unwrap()))
        .clone()
}

fn suite() -> MetricSuite {
    MetricSuite::new(rig())
}

fn population(seed: u64) -> Population {
    let engine = Engine::new(rig(), GaConfig::default()).unwrap();
    engine.protocol_init(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn t1() -> WeightVector {
    targets::single_shape(&rig()).unwrap().weights
}

#[test]
fn auto_select_matches_exhaustive_sort() {
    let suite = suite();
    let rig = rig();
    for seed in 0..40 {
        let pop = population(seed);
        let target = targets::twelve_shape(&rig).unwrap().weights;
        for (kind, oracle) in [
            (MetricKind::Cd, Box::new(|w: &WeightVector| cd_weights(&target, w).ok()) as Box<dyn Fn(&WeightVector) -> Option<f64>>),
            (
                MetricKind::EdBlend,
                Box::new(|w: &WeightVector| {
                    let (a, b) = (rig.reduce(&target), rig.reduce(w));
                    Some(a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
                }),
            ),
        ] {
            let prepared = suite.prepare(kind, &target).unwrap();
            let mut order: Vec<(f64, usize)> = pop
                .members
                .iter()
                .enumerate()
                .map(|(i, m)| (oracle(&m.weights).unwrap_or(f64::INFINITY), i))
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for count in 1..=10 {
                let got = auto_select(&suite, &prepared, &pop, count).unwrap();
                let mut want: Vec<usize> = order.iter().take(count).map(|o| o.1).collect();
                assert_eq!(got.selection.elite, want[0], "{kind} count {count}");
                want.remove(0);
                assert_eq!(got.selection.others, want, "{kind} count {count}");
            }
        }
    }
}

#[test]
fn auto_select_scores_are_ordered() {
    let suite = suite();
    let target = t1();
    let prepared = suite.prepare(MetricKind::Cd, &target).unwrap();
    for seed in 0..40 {
        let pop = population(seed);
        let s = auto_select(&suite, &prepared, &pop, 4).unwrap();
        let scores = s.scores.unwrap();
        let d = |i: usize| scores[i].unwrap_or(f64::INFINITY);
        let chosen = s.selection.all();
        for &o in &s.selection.others {
            assert!(d(s.selection.elite) <= d(o));
        }
        for i in (0..pop.len()).filter(|i| !chosen.contains(i)) {
            assert!(chosen.iter().all(|&c| d(c) <= d(i)));
        }
    }
}

#[test]
fn target_in_population_becomes_elite() {
    let suite = suite();
    let target = t1();
    let prepared = suite.prepare(MetricKind::Cd, &target).unwrap();
    let mut pop = population(3);
    pop.members[6].weights = target.clone();
    let s = auto_select(&suite, &prepared, &pop, 1).unwrap();
    assert_eq!(s.selection.elite, 6);
    assert!(s.selection.others.is_empty());
}

#[test]
fn neutral_member_ranks_last_under_cosine_distance() {
    let suite = suite();
    let prepared = suite.prepare(MetricKind::Cd, &t1()).unwrap();
    let pop = population(5);
    let neutral = pop.members.iter().position(|m| m.weights.norm() == 0.0).unwrap();
    let s = auto_select(&suite, &prepared, &pop, 10).unwrap();
    assert_eq!(*s.selection.all().last().unwrap(), neutral);
    assert!(auto_select(&suite, &prepared, &pop, 0).is_err());
    assert!(auto_select(&suite, &prepared, &pop, 11).is_err());
}

#[test]
fn selection_fails_when_metric_is_undefined_everywhere() {
    let suite = suite();
    let prepared = suite.prepare(MetricKind::Cd, &t1()).unwrap();
    let mut pop = population(1);
    for m in &mut pop.members {
        m.weights = rig().zeros();
    }
    assert!(auto_select(&suite, &prepared, &pop, 2).is_err());
}

#[test]
fn schedule_defaults() {
    assert_eq!(default_schedule(10), vec![2, 4, 4, 4, 4, 4, 5, 5, 5, 5, 5]);
    let sim = SimConfig::new(t1(), MetricKind::Cd);
    assert_eq!(sim.repetitions, 500);
    assert_eq!(sim.generations, 10);
    sim.validate().unwrap();
    let mut bad = sim.clone();
    bad.schedule.pop();
    assert!(bad.validate().is_err());
    let mut bad = sim.clone();
    bad.schedule[3] = 11;
    assert!(bad.validate().is_err());
    assert_eq!(sim.ga_config(17).stream, 17);
}

#[test]
fn simulation_is_deterministic_and_converges() {
    let suite = suite();
    let sim = SimConfig::new(t1(), MetricKind::Cd).with_repetitions(12).with_seed(9);
    let a = run_simulation(&suite, &sim).unwrap();
    let b = run_simulation(&suite, &sim).unwrap();
    assert_eq!(a, b);
    let c = run_simulation(&suite, &sim.clone().with_seed(10)).unwrap();
    assert_ne!(a.repetitions, c.repetitions);
    assert!(a.failed.is_empty());
    assert_eq!(a.generations.len(), 11);
    for g in &a.generations {
        assert_eq!(g.errors.len(), 12);
        assert!(g.errors.iter().all(|e| (0.0..=1.0).contains(e)));
    }
    assert!(a.last().mean < a.initial().mean);
}

#[test]
fn simulation_errors_match_independent_cosine_distance() {
    let suite = suite();
    let target = t1();
    let sim = SimConfig::new(target.clone(), MetricKind::Cd).with_repetitions(4).with_generations(3);
    let stats = run_simulation(&suite, &sim).unwrap();
    for rep in &stats.repetitions {
        assert_eq!(rep.elites.len(), 4);
        for (e, w) in rep.errors.iter().zip(&rep.elites) {
            let dot: f64 = target.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            let want = 1.0 - dot / (target.norm() * w.norm());
            assert!((e - want).abs() < 1e-12);
        }
    }
    let (mean, std) = stats::mean_std(&stats.last().errors);
    assert_eq!((mean, std), (stats.last().mean, stats.last().std));
}

#[test]
fn fixed_set_containing_target_locks_on() {
    let rig = rig();
    let target = targets::twelve_shape(&rig).unwrap().weights;
    let mut sets = targets::desk_fixed_sets(&rig, 1, 4, 2).unwrap();
    sets[0].members[4] = target.clone();
    let mut sim = SimConfig::new(target, MetricKind::Cd).with_repetitions(6);
    sim.init_mode = InitMode::Fixed;
    sim.fixed_sets = sets;
    let stats = run_simulation(&suite(), &sim).unwrap();
    for g in &stats.generations {
        assert!(g.mean < 1e-12, "generation {} mean {}", g.generation, g.mean);
    }
}

#[test]
fn fixed_initialization_has_lower_initial_spread() {
    let rig = rig();
    let suite = suite();
    let target = targets::three_shape(&rig).unwrap().weights;
    let (mut fixed, mut protocol) = (0.0, 0.0);
    for seed in 0..4 {
        let base = SimConfig::new(target.clone(), MetricKind::Cd)
            .with_repetitions(30)
            .with_generations(1)
            .with_seed(seed);
        let mut sim = base.clone();
        sim.init_mode = InitMode::Fixed;
        sim.fixed_sets = targets::desk_fixed_sets(&rig, 3, 6, seed).unwrap();
        fixed += run_simulation(&suite, &sim).unwrap().initial().std;
        protocol += run_simulation(&suite, &base).unwrap().initial().std;
    }
    assert!(fixed < protocol, "fixed {fixed} protocol {protocol}");
}

#[test]
fn kl_series_basics() {
    let same = histogram(&[0.1, 0.2, 0.3]);
    assert_eq!(kl_divergence(&same, &same).unwrap(), 0.0);
    let sim = SimConfig::new(t1(), MetricKind::Cd).with_repetitions(10);
    let stats = run_simulation(&suite(), &sim).unwrap();
    let series = kl_series(&stats).unwrap();
    assert_eq!(series.len(), 10);
    assert!(series.iter().all(|k| k.is_finite() && *k >= 0.0));
    let mut one = stats.clone();
    one.generations.truncate(1);
    assert!(kl_series(&one).is_err());
    assert!(stats::histogram(&[], KL_BINS, KL_SMOOTHING).is_err());
}

fn histogram(values: &[f64]) -> Vec<f64> {
    stats::histogram(values, KL_BINS, KL_SMOOTHING).unwrap()
}

proptest! {
    #[test]
    fn kl_is_non_negative(a in proptest::collection::vec(0.0..=1.0f64, 1..60), b in proptest::collection::vec(0.0..=1.0f64, 1..60)) {
        let k = kl_divergence(&histogram(&a), &histogram(&b)).unwrap();
        prop_assert!(k >= 0.0 && k.is_finite());
    }

    #[test]
    fn histogram_is_a_distribution(a in proptest::collection::vec(-0.5..=1.5f64, 1..60)) {
        let h = histogram(&a);
        prop_assert_eq!(h.len(), KL_BINS);
        prop_assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Three isotropic 3-D blobs with spread 0.1 of their pairwise distance.
fn blobs(n: usize, seed: u64) -> (Vec<Vec<Vec<f64>>>, Vec<Vec<f64>>) {
    let centers = vec![vec![0.0, 0.0, 0.0], vec![10.0, 0.0, 0.0], vec![5.0, 8.660254037844386, 0.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = centers
        .iter()
        .map(|c| {
            (0..n)
                .map(|_| c.iter().map(|&m| m + 1.0 * normal(&mut rng)).collect())
                .collect()
        })
        .collect();
    (sets, centers)
}

#[test]
fn gmm_recovers_separated_gaussians() {
    let (sets, centers) = blobs(200, 4);
    let all: Vec<Vec<f64>> = sets.iter().flatten().cloned().collect();
    let gmm = fit_gmm(&all, 3, &GmmOptions::default()).unwrap();
    assert!((gmm.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let names = gmm::name_clusters(&gmm, &centers).unwrap();
    assert!(names.iter().all(Option::is_some));
    let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let table = separability_table(&sets, &labels, &gmm, &names).unwrap();
    assert!(table.accuracy() >= 0.99, "{:?}", table.counts);
    for (row, set) in table.counts.iter().zip(&sets) {
        assert_eq!(row.iter().sum::<usize>(), set.len());
    }
}

#[test]
fn single_component_matches_sample_moments() {
    let (sets, _) = blobs(100, 8);
    let all: Vec<Vec<f64>> = sets.iter().flatten().cloned().collect();
    let gmm = fit_gmm(&all, 1, &GmmOptions::default()).unwrap();
    let n = all.len() as f64;
    let mean: Vec<f64> = (0..3).map(|c| all.iter().map(|x| x[c]).sum::<f64>() / n).collect();
    for c in 0..3 {
        assert!((gmm.means[0][c] - mean[c]).abs() < 1e-6);
        for d in 0..3 {
            let cov = all.iter().map(|x| (x[c] - mean[c]) * (x[d] - mean[d])).sum::<f64>() / n;
            assert!((gmm.covariances[0][c][d] - cov).abs() < 1e-6);
        }
    }
}

#[test]
fn log_likelihood_never_decreases() {
    for seed in 0..5 {
        let (mut sets, _) = blobs(60, seed);
        sets[1].iter_mut().for_each(|x| x[0] -= 6.0);
        let all: Vec<Vec<f64>> = sets.iter().flatten().cloned().collect();
        let gmm = fit_gmm(&all, 3, &GmmOptions { seed, ..GmmOptions::default() }).unwrap();
        for w in gmm.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9 * w[0].abs(), "{w:?}");
        }
        assert_eq!(*gmm.trace.last().unwrap(), gmm.log_likelihood);
    }
}

#[test]
fn gmm_input_validation() {
    let (sets, _) = blobs(3, 0);
    let all: Vec<Vec<f64>> = sets.iter().flatten().cloned().collect();
    assert!(fit_gmm(&all, 3, &GmmOptions::default()).is_err());
    assert!(fit_gmm(&all, 0, &GmmOptions::default()).is_err());
    let same = vec![vec![1.0, 2.0]; 40];
    assert!(fit_gmm(&same, 2, &GmmOptions::default()).is_err());
}

#[test]
fn perfect_sets_give_a_diagonal_table() {
    let (sets, centers) = blobs(50, 2);
    let tight: Vec<Vec<Vec<f64>>> = sets
        .iter()
        .zip(&centers)
        .map(|(s, c)| s.iter().map(|x| x.iter().zip(c).map(|(v, m)| m + 0.01 * (v - m)).collect()).collect())
        .collect();
    let all: Vec<Vec<f64>> = tight.iter().flatten().cloned().collect();
    let gmm = fit_gmm(&all, 3, &GmmOptions::default()).unwrap();
    let names = gmm::name_clusters(&gmm, &centers).unwrap();
    let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let table = separability_table(&tight, &labels, &gmm, &names).unwrap();
    for (t, row) in table.counts.iter().enumerate() {
        for (c, &n) in row.iter().enumerate() {
            assert_eq!(n, if t == c { 50 } else { 0 });
        }
    }
    assert_eq!(table.accuracy(), 1.0);
}

#[test]
fn shuffled_labels_spread_evenly() {
    let (sets, centers) = blobs(300, 6);
    let mut all: Vec<Vec<f64>> = sets.iter().flatten().cloned().collect();
    let gmm = fit_gmm(&all, 3, &GmmOptions::default()).unwrap();
    let names = gmm::name_clusters(&gmm, &centers).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in (1..all.len()).rev() {
        let j = rng.random_range(0..=i);
        all.swap(i, j);
    }
    let shuffled: Vec<Vec<Vec<f64>>> = all.chunks(300).map(|c| c.to_vec()).collect();
    let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let table = separability_table(&shuffled, &labels, &gmm, &names).unwrap();
    for row in &table.counts {
        for &n in &row[..3] {
            // Binomial(300, 1/3): standard deviation about 8.2.
            assert!((n as f64 - 100.0).abs() < 35.0, "{:?}", table.counts);
        }
    }
}

#[test]
fn unclaimed_cluster_goes_to_unnamed_column() {
    let (sets, centers) = blobs(40, 3);
    let all: Vec<Vec<f64>> = sets.iter().flatten().cloned().collect();
    let gmm = fit_gmm(&all, 3, &GmmOptions::default()).unwrap();
    let refs = vec![centers[0].clone(), centers[0].clone(), centers[2].clone()];
    let names = gmm::name_clusters(&gmm, &refs).unwrap();
    assert_eq!(names.iter().flatten().count(), 2);
    let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let table = separability_table(&sets, &labels, &gmm, &names).unwrap();
    assert_eq!(table.counts[1][3], 40);
    assert_eq!(table.counts[1][1], 0);
}

#[test]
fn target_bias_cases() {
    let target = t1();
    let mut pop = population(11);
    let want = pop
        .members
        .iter()
        .filter_map(|m| cd_weights(&target, &m.weights).ok())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(target_bias(&pop, &target).unwrap(), want);
    pop.members[2].weights = target.clone();
    assert!(target_bias(&pop, &target).unwrap() < 1e-12);

    let mut disjoint = rig().zeros();
    disjoint[rig().shape_index("brow_raise_L").unwrap()] = 1.0;
    let mut only = population(0);
    for m in &mut only.members {
        m.weights = rig().zeros();
        m.weights[rig().shape_index("lip_press").unwrap()] = 0.5;
    }
    assert_eq!(target_bias(&only, &disjoint).unwrap(), 1.0);
}

#[test]
fn target_bias_estimate_agrees_with_large_sample_reference() {
    let rig = rig();
    let target = targets::three_shape(&rig).unwrap().weights;
    let small = expected_target_bias(&rig, &GaConfig { seed: 1, ..GaConfig::default() }, &target, 400).unwrap();
    let large = expected_target_bias(&rig, &GaConfig { seed: 2, ..GaConfig::default() }, &target, 10_000).unwrap();
    assert_eq!(small.samples.len(), 400);
    assert!((small.stderr - small.std / 20.0).abs() < 1e-15);
    let tolerance = 2.0 * (small.stderr.powi(2) + large.stderr.powi(2)).sqrt();
    assert!(
        (small.mean - large.mean).abs() <= tolerance,
        "{} vs {} (tolerance {tolerance})",
        small.mean,
        large.mean
    );
    let engine = Engine::new(rig.clone(), GaConfig { seed: 1, ..GaConfig::default() }).unwrap();
    for i in [0usize, 7, 399] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        rng.set_stream(i as u64);
        let pop = engine.protocol_init(&mut rng).unwrap();
        assert_eq!(small.samples[i], target_bias(&pop, &target).unwrap());
    }
}

#[test]
fn repeatability_bins_cases() {
    let rig = rig();
    let t = t1();
    assert_eq!(repeatability_bins(&[&t, &t, &t]).unwrap(), [100.0, 0.0, 0.0, 0.0]);
    let one_hot: Vec<WeightVector> = rig.unique_core_indices()[..4]
        .iter()
        .map(|&i| {
            let mut w = rig.zeros();
            w[i] = 1.0;
            w
        })
        .collect();
    let refs: Vec<&WeightVector> = one_hot.iter().collect();
    assert_eq!(repeatability_bins(&refs).unwrap(), [0.0, 0.0, 0.0, 100.0]);
    assert!(repeatability_bins(&[&t]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn repeatability_bins_sum_to_100(seed in 0u64..1000, n in 2usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rig = rig();
        let elites: Vec<WeightVector> = (0..n)
            .map(|_| {
                let mut w = rig.zeros();
                for &i in rig.unique_core_indices() {
                    if rng.random_bool(0.3) {
                        w[i] = rng.random();
                    }
                }
                w
            })
            .collect();
        let refs: Vec<&WeightVector> = elites.iter().collect();
        let bins = repeatability_bins(&refs).unwrap();
        prop_assert!((bins.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }
}

#[test]
fn degenerate_activation_range_fixes_active_count() {
    let rig = rig();
    for k in [1usize, 2, 3] {
        let config = GaConfig {
            init_activation_range: (k, k),
            ..GaConfig::default()
        };
        let engine = Engine::new(rig.clone(), config).unwrap();
        for seed in 0..10 {
            let pop = engine.protocol_init(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for m in &pop.members[..9] {
                assert_eq!(engine.space().active(&m.weights).len(), k);
            }
        }
    }
}

#[test]
fn activation_study_shape_and_validation() {
    let suite = suite();
    let rig = rig();
    let base = SimConfig::new(t1(), MetricKind::Cd).with_repetitions(4).with_generations(2);
    let targets = vec![("t1".to_string(), t1()), ("t3".to_string(), targets::three_shape(&rig).unwrap().weights)];
    let rows = activation_study(&suite, &base, &[(1, 3), (3, 8)], &targets).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1].range, (1, 3));
    assert_eq!(rows[1].target, "t3");
    let genes = rig.unique_core_indices().len();
    assert!(activation_study(&suite, &base, &[(1, genes + 1)], &targets).is_err());
    assert!(activation_study(&suite, &base, &[(4, 2)], &targets).is_err());
}

#[test]
fn ranked_pressure_keeps_accuracy() {
    let suite = suite();
    let rig = rig();
    for t in targets::complexity_targets(&rig).unwrap() {
        let sim = SimConfig::new(t.weights, MetricKind::Cd).with_repetitions(150);
        let default = run_simulation(&suite, &sim).unwrap();
        let ranked = pressure_variant(&suite, &sim).unwrap();
        let ratio = ranked.last().mean / default.last().mean;
        assert!((ratio - 1.0).abs() <= 0.1, "{}: ranked {} default {}", t.name, ranked.last().mean, default.last().mean);
    }
}

#[test]
fn ranked_pressure_pairs_each_rank_once() {
    let suite = suite();
    let sim = SimConfig::new(t1(), MetricKind::Cd).with_repetitions(1);
    let prepared = suite.prepare(sim.metric, &sim.target).unwrap();
    let mut ranked = sim.clone();
    ranked.pressure = emogen_core::evolution::PressureMode::Ranked;
    let log = simulate_repetition(&suite, &ranked, &prepared, 0).unwrap();
    let gens = log.generations();
    let mut seen_ranked = false;
    for pair in gens.windows(2) {
        let mut parents: Vec<[usize; 2]> = pair[1]
            .population
            .members
            .iter()
            .filter_map(|m| match &m.provenance {
                Provenance::RankedChild { parents, .. } => Some(*parents),
                _ => None,
            })
            .collect();
        seen_ranked |= !parents.is_empty();
        parents.dedup();
        let mut sorted = parents.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), parents.len());
    }
    assert!(seen_ranked);
}

#[test]
fn heatmap_field_properties() {
    let rig = rig();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = t1();
    assert!(heatmap_field(&rig, &t, &t).unwrap().iter().all(|&d| d == 0.0));
    for _ in 0..20 {
        let mut w = rig.zeros();
        for &i in rig.unique_core_indices() {
            if rng.random_bool(0.3) {
                w[i] = rng.random();
            }
        }
        let w = rig.complete(&w);
        let field = heatmap_field(&rig, &t, &w).unwrap();
        let (a, b) = (rig.evaluate_vertices(&t).unwrap(), rig.evaluate_vertices(&w).unwrap());
        assert_eq!(field.len(), rig.vertex_count());
        for ((f, p), q) in field.iter().zip(&a).zip(&b) {
            let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
            assert!((f - d).abs() < 1e-12);
        }
        let rms = vrtx_rms(&rig.evaluate(&t).unwrap(), &rig.evaluate(&w).unwrap()).unwrap();
        assert!(field.iter().copied().fold(0.0, f64::max) >= rms);
    }
    let a = rig.neutral().clone();
    let mut b = a.clone();
    b.vertices[17][1] += 0.3;
    let field = vertex_distance_field(&a, &b).unwrap();
    for (i, &d) in field.iter().enumerate() {
        assert!((d - if i == 17 { 0.3 } else { 0.0 }).abs() < 1e-12);
    }
}

#[test]
fn csv_exports_have_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let sim = SimConfig::new(t1(), MetricKind::Cd).with_repetitions(3).with_generations(4);
    let stats = run_simulation(&suite(), &sim).unwrap();
    let path = dir.path().join("dist.csv");
    write_distribution_csv(&path, &stats).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 5);
    assert_eq!(text.lines().next().unwrap(), "repetition,generation,cd_error");

    let path = dir.path().join("summary.csv");
    write_summary_csv(&path, &stats).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 6);

    let path = dir.path().join("kl.csv");
    write_kl_csv(&path, &kl_series(&stats).unwrap()).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 5);

    let table = SeparabilityTable {
        labels: vec!["a".into(), "b".into()],
        counts: vec![vec![3, 1, 0], vec![0, 4, 1]],
        cluster_to_source: vec![Some(0), Some(1)],
    };
    let path = dir.path().join("table.csv");
    write_separability_csv(&path, &table).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "target,a,b,unnamed\na,3,1,0\nb,0,4,1\n");
}

#[test]
fn desk_targets_have_the_intended_structure() {
    let rig = rig();
    let space = emogen_core::evolution::GeneSpace::new(&rig, false, false);
    let t1 = targets::single_shape(&rig).unwrap();
    let t3 = targets::three_shape(&rig).unwrap();
    let t2 = targets::twelve_shape(&rig).unwrap();
    let dense = targets::dense(&rig).unwrap();
    assert_eq!(space.active(&t1.weights).len(), 1);
    assert_eq!(space.active(&t2.weights).len(), 12);
    let (a1, a3) = (space.active(&t1.weights), space.active(&t3.weights));
    assert_eq!(a3.len(), 2);
    assert!(a1.iter().all(|i| a3.contains(i)));
    assert!(space.active(&dense.weights).len() > 12);
    for t in [&t1, &t2, &t3, &dense] {
        assert!(t.description.contains("desk analog"));
        assert_eq!(targets::by_name(&rig, &t.name).unwrap(), *t);
    }
    assert!(targets::by_name(&rig, "t9").is_err());
    let sets: Vec<FixedSet> = targets::desk_fixed_sets(&rig, 2, 5, 0).unwrap();
    assert_eq!(sets.len(), 2);
    assert!(sets.iter().all(|s| s.members.len() == 10));
}
