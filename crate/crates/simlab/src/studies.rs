//! Experiments built from repeated simulations.

use emogen_core::evolution::{Engine, GaConfig, Population};
use emogen_core::metrics::{cd_weights, vertex_distance_field, MetricKind, MetricSuite, PcaModel, DEFAULT_VARIANCE_TARGET};
use emogen_core::rig::{BlendshapeRig, WeightVector};
use emogen_core::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::gmm::{fit_gmm, name_clusters, separability_table, GmmModel, GmmOptions, SeparabilityTable};
use crate::simulate::{run_simulation, DistributionStats};
use crate::stats::mean_std;

/// Cosine distance from the target to the closest member of an initial
/// population. Neutral members are skipped.
pub fn target_bias(init: &Population, target: &WeightVector) -> Result<f64> {
    init.members
        .iter()
        .filter_map(|m| cd_weights(target, &m.weights).ok())
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::UndefinedMetric("no member has a defined cosine distance".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasEstimate {
    pub mean: f64,
    pub std: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub samples: Vec<f64>,
}

/// Target bias averaged over `draws` initial populations of `config`, drawn
/// on generator streams `0..draws`.
pub fn expected_target_bias(
    rig: &std::sync::Arc<BlendshapeRig>,
    config: &GaConfig,
    target: &WeightVector,
    draws: usize,
) -> Result<BiasEstimate> {
    if draws == 0 {
        return Err(Error::invalid("need at least one draw"));
    }
    let engine = Engine::new(rig.clone(), config.clone())?;
    let samples = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let pop = engine.protocol_init(&mut rng)?;
            target_bias(&pop, target)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, std) = mean_std(&samples);
    Ok(BiasEstimate {
        mean,
        std,
        stderr: std / (draws as f64).sqrt(),
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivationRow {
    pub range: (usize, usize),
    pub target: String,
    pub mu0: f64,
    pub sigma0: f64,
    pub mu_final: f64,
    pub sigma_final: f64,
}

/// Initial bias and final error for every initialization activation range
/// and target, under protocol initialization.
pub fn activation_study(
    suite: &MetricSuite,
    base: &SimConfig,
    ranges: &[(usize, usize)],
    targets: &[(String, WeightVector)],
) -> Result<Vec<ActivationRow>> {
    let genes = suite.rig().unique_core_indices().len();
    let mut rows = Vec::new();
    for &(lo, hi) in ranges {
        if lo > hi || hi > genes {
            return Err(Error::Config(format!(
                "activation range ({lo}, {hi}) is not within the {genes} unique cores"
            )));
        }
        for (name, target) in targets {
            let sim = SimConfig {
                target: target.clone(),
                init_mode: emogen_core::evolution::InitMode::Protocol,
                init_activation_range: (lo, hi),
                ..base.clone()
            };
            let stats = run_simulation(suite, &sim)?;
            rows.push(ActivationRow {
                range: (lo, hi),
                target: name.clone(),
                mu0: stats.initial().mean,
                sigma0: stats.initial().std,
                mu_final: stats.last().mean,
                sigma_final: stats.last().std,
            });
        }
    }
    Ok(rows)
}

/// The simulation rerun with rank-paired breeding.
pub fn pressure_variant(suite: &MetricSuite, sim: &SimConfig) -> Result<DistributionStats> {
    let ranked = SimConfig {
        pressure: emogen_core::evolution::PressureMode::Ranked,
        ..sim.clone()
    };
    run_simulation(suite, &ranked)
}

/// Per-vertex distance between the faces of two weight vectors.
pub fn heatmap_field(rig: &BlendshapeRig, a: &WeightVector, b: &WeightVector) -> Result<Vec<f64>> {
    vertex_distance_field(&rig.evaluate(a)?, &rig.evaluate(b)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub metric: MetricKind,
    pub table: SeparabilityTable,
    pub accuracy: f64,
    pub pca: PcaModel,
    pub gmm: GmmModel,
}

/// Final elites of one simulation per target, in target order.
pub fn elite_sets(suite: &MetricSuite, base: &SimConfig, targets: &[(String, WeightVector)]) -> Result<Vec<Vec<WeightVector>>> {
    targets
        .iter()
        .map(|(_, target)| {
            let sim = SimConfig {
                target: target.clone(),
                ..base.clone()
            };
            let stats = run_simulation(suite, &sim)?;
            Ok(stats.final_elites().into_iter().cloned().collect())
        })
        .collect()
}

/// Projects elite sets into a PCA space built from all elites and the
/// targets, optionally cut to its leading `max_components`, then clusters them with a mixture of one component per target.
/// Clusters are named by the component that claims each elite set's mean,
/// falling back to the targets themselves when that names fewer clusters.
pub fn analyze_separability(
    rig: &BlendshapeRig,
    metric: MetricKind,
    targets: &[(String, WeightVector)],
    elites: &[Vec<WeightVector>],
    gmm_options: &GmmOptions,
    max_components: Option<usize>,
) -> Result<SeparabilityReport> {
    if elites.len() != targets.len() || elites.iter().any(Vec::is_empty) {
        return Err(Error::invalid("need one non-empty elite set per target"));
    }
    let reduced_sets: Vec<Vec<Vec<f64>>> = elites
        .iter()
        .map(|s| s.iter().map(|w| rig.reduce(w)).collect())
        .collect();
    let mut training: Vec<Vec<f64>> = reduced_sets.iter().flatten().cloned().collect();
    training.extend(targets.iter().map(|(_, t)| rig.reduce(t)));
    let mut pca = PcaModel::fit(&training, DEFAULT_VARIANCE_TARGET)?;
    if let Some(k) = max_components {
        if k == 0 {
            return Err(Error::invalid("need at least one PCA component"));
        }
        pca.components.truncate(k);
        pca.variances.truncate(k);
    }
    let sets = reduced_sets
        .iter()
        .map(|s| s.iter().map(|v| pca.project(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<Vec<f64>> = sets.iter().flatten().cloned().collect();
    let gmm = fit_gmm(&all, targets.len(), gmm_options)?;

    let means: Vec<Vec<f64>> = sets
        .iter()
        .map(|s| {
            let n = s.len() as f64;
            (0..pca.retained()).map(|c| s.iter().map(|b| b[c]).sum::<f64>() / n).collect()
        })
        .collect();
    let mut names = name_clusters(&gmm, &means)?;
    if names.iter().flatten().count() < targets.len() {
        let projected = targets
            .iter()
            .map(|(_, t)| pca.project(&rig.reduce(t)))
            .collect::<Result<Vec<_>>>()?;
        let alt = name_clusters(&gmm, &projected)?;
        if alt.iter().flatten().count() > names.iter().flatten().count() {
            names = alt;
        }
    }
    let labels: Vec<String> = targets.iter().map(|(n, _)| n.clone()).collect();
    let table = separability_table(&sets, &labels, &gmm, &names)?;
    Ok(SeparabilityReport {
        metric,
        accuracy: table.accuracy(),
        table,
        pca,
        gmm,
    })
}

/// [`elite_sets`] followed by [`analyze_separability`].
pub fn separability(
    suite: &MetricSuite,
    base: &SimConfig,
    targets: &[(String, WeightVector)],
    gmm_options: &GmmOptions,
    max_components: Option<usize>,
) -> Result<SeparabilityReport> {
    let elites = elite_sets(suite, base, targets)?;
    analyze_separability(suite.rig(), base.metric, targets, &elites, gmm_options, max_components)
}
