use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use emogen_core::evolution::{Engine, GaConfig, InitMode, PressureMode};
use emogen_core::io::{read_document, read_log, write_document, write_obj, write_scalar_csv};
use emogen_core::metrics::{offset_vector, vrtx_rms, MetricKind, MetricSuite, PcaModel, VertexCovariance, DEFAULT_VARIANCE_TARGET};
use emogen_core::rig::{BlendshapeRig, WeightVector};
use emogen_simlab::export::{
    write_activation_csv, write_bins_csv, write_distribution_csv, write_kl_csv, write_separability_csv,
    write_summary_csv,
};
use emogen_simlab::studies::{activation_study, expected_target_bias, heatmap_field, pressure_variant, separability};
use emogen_simlab::targets::{self, DeskTarget};
use emogen_simlab::{kl_series, repeatability_bins, run_simulation, DistributionStats, GmmOptions, SimConfig};
use serde::Serialize;

pub const STATS_SCHEMA: &str = "emogen-stats/1";
const MODEL_TRAINING_POPULATIONS: usize = 60;

/// Metric suite with the PCA and vertex covariance models fitted on
/// initial populations when `metric` needs them.
pub fn suite_for(rig: &Arc<BlendshapeRig>, metric: MetricKind, seed: u64) -> anyhow::Result<MetricSuite> {
    let suite = MetricSuite::new(rig.clone());
    if !metric.needs_pca() && metric != MetricKind::MdVertex {
        return Ok(suite);
    }
    let engine = Engine::new(rig.clone(), GaConfig { seed, ..GaConfig::default() })?;
    let mut faces = Vec::new();
    for stream in 0..MODEL_TRAINING_POPULATIONS as u64 {
        let mut rng = rand_stream(seed, stream);
        faces.extend(engine.protocol_init(&mut rng)?.members.into_iter().map(|m| m.weights));
    }
    if metric.needs_pca() {
        let reduced: Vec<Vec<f64>> = faces.iter().map(|w| rig.reduce(w)).collect();
        Ok(suite.with_pca(PcaModel::fit(&reduced, DEFAULT_VARIANCE_TARGET)?))
    } else {
        let offsets = faces
            .iter()
            .map(|w| offset_vector(&rig.evaluate(w)?, rig.neutral()))
            .collect::<emogen_core::Result<Vec<_>>>()?;
        Ok(suite.with_vertex_covariance(VertexCovariance::fit(&offsets)?))
    }
}

fn rand_stream(seed: u64, stream: u64) -> impl rand::Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Init {
    Protocol,
    Fixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Pressure {
    Default,
    Ranked,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once('-').ok_or_else(|| format!("expected LO-HI, got '{s}'"))?;
    let lo = lo.trim().parse().map_err(|_| format!("bad lower bound in '{s}'"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad upper bound in '{s}'"))?;
    Ok((lo, hi))
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Desk target: t1, t3, t2 or dense.
    #[arg(long, default_value = "t1")]
    target: String,
    #[arg(long, default_value = "cd")]
    metric: MetricKind,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 10)]
    generations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "protocol")]
    init: Init,
    /// Number of generated fixed-initialization sets.
    #[arg(long, default_value_t = 10)]
    fixed_sets: usize,
    /// Unique cores active in every fixed-set member.
    #[arg(long, default_value_t = 4)]
    fixed_active: usize,
    #[arg(long, value_enum, default_value = "default")]
    pressure: Pressure,
    /// Active unique cores of random initial members, as LO-HI.
    #[arg(long, value_parser = parse_range, default_value = "3-8")]
    activation: (usize, usize),
}

impl SimArgs {
    fn build(&self, rig: &BlendshapeRig) -> anyhow::Result<(DeskTarget, SimConfig)> {
        let target = targets::by_name(rig, &self.target)?;
        let mut sim = SimConfig::new(target.weights.clone(), self.metric)
            .with_repetitions(self.reps)
            .with_generations(self.generations)
            .with_seed(self.seed);
        sim.init_activation_range = self.activation;
        sim.pressure = match self.pressure {
            Pressure::Default => PressureMode::Default,
            Pressure::Ranked => PressureMode::Ranked,
        };
        if let Init::Fixed = self.init {
            sim.init_mode = InitMode::Fixed;
            sim.fixed_sets = targets::desk_fixed_sets(rig, self.fixed_sets, self.fixed_active, self.seed)?;
        }
        Ok((target, sim))
    }
}

fn out_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn print_summary(stats: &DistributionStats) {
    for g in &stats.generations {
        println!("generation {:>2}: mean {:.4} std {:.4}", g.generation, g.mean, g.std);
    }
    if !stats.failed.is_empty() {
        println!("{} repetitions ended early", stats.failed.len());
    }
}

#[derive(Serialize)]
struct GenerationSummary {
    generation: usize,
    mean: f64,
    std: f64,
}

#[derive(Serialize)]
struct SimulationDoc<'a> {
    target: &'a str,
    description: &'a str,
    config: &'a SimConfig,
    generations: Vec<GenerationSummary>,
    kl: &'a [f64],
    repeatability_bins: [f64; 4],
    failed: &'a [(usize, String)],
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Directory for the CSV files and the stats document.
    #[arg(long)]
    out: PathBuf,
}

pub fn simulate(rig: Arc<BlendshapeRig>, args: SimulateArgs) -> anyhow::Result<()> {
    let (target, sim) = args.sim.build(&rig)?;
    let suite = suite_for(&rig, sim.metric, sim.seed)?;
    let stats = run_simulation(&suite, &sim)?;
    let kl = kl_series(&stats)?;
    let bins = repeatability_bins(&stats.final_elites())?;
    out_dir(&args.out)?;
    write_distribution_csv(&args.out.join("distribution.csv"), &stats)?;
    write_summary_csv(&args.out.join("summary.csv"), &stats)?;
    write_kl_csv(&args.out.join("kl.csv"), &kl)?;
    write_bins_csv(&args.out.join("bins.csv"), &bins)?;
    let doc = SimulationDoc {
        target: &target.name,
        description: &target.description,
        config: &sim,
        generations: stats
            .generations
            .iter()
            .map(|g| GenerationSummary {
                generation: g.generation,
                mean: g.mean,
                std: g.std,
            })
            .collect(),
        kl: &kl,
        repeatability_bins: bins,
        failed: &stats.failed,
    };
    write_document(&args.out.join("stats.json"), STATS_SCHEMA, &doc)?;
    println!("{} ({}), metric {}", target.name, target.description, sim.metric);
    print_summary(&stats);
    Ok(())
}

#[derive(Debug, Args)]
pub struct KlArgs {
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn kl(rig: Arc<BlendshapeRig>, args: KlArgs) -> anyhow::Result<()> {
    let (_, sim) = args.sim.build(&rig)?;
    let suite = suite_for(&rig, sim.metric, sim.seed)?;
    let series = kl_series(&run_simulation(&suite, &sim)?)?;
    if let Some(path) = &args.out {
        write_kl_csv(path, &series)?;
    }
    for (g, k) in series.iter().enumerate() {
        println!("{g} -> {}: {k:.6}", g + 1);
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct GmmArgs {
    #[arg(long, default_value = "cd")]
    metric: MetricKind,
    /// Repetitions per target.
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 10)]
    generations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only the leading PCA components.
    #[arg(long)]
    components: Option<usize>,
    /// JSON file of GMM options.
    #[arg(long)]
    gmm_options: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn analyze_gmm(rig: Arc<BlendshapeRig>, args: GmmArgs) -> anyhow::Result<()> {
    let named: Vec<(String, WeightVector)> = targets::complexity_targets(&rig)?
        .into_iter()
        .map(|t| (t.name, t.weights))
        .collect();
    let opts = match &args.gmm_options {
        Some(p) => read_document(p, "emogen-gmm/1").with_context(|| format!("{}", p.display()))?,
        None => GmmOptions {
            seed: args.seed,
            ..GmmOptions::default()
        },
    };
    let suite = suite_for(&rig, args.metric, args.seed)?;
    let base = SimConfig::new(named[0].1.clone(), args.metric)
        .with_repetitions(args.reps)
        .with_generations(args.generations)
        .with_seed(args.seed);
    let report = separability(&suite, &base, &named, &opts, args.components)?;
    if let Some(path) = &args.out {
        write_separability_csv(path, &report.table)?;
    }
    println!(
        "metric {}: accuracy {:.3} over {} PCA components",
        report.metric,
        report.accuracy,
        report.pca.retained()
    );
    for (label, row) in report.table.labels.iter().zip(&report.table.counts) {
        println!("{label}: {row:?}");
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    #[arg(long, default_value = "t1")]
    target: String,
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_range, default_value = "3-8")]
    activation: (usize, usize),
}

#[derive(Serialize)]
struct BiasDoc<'a> {
    target: &'a str,
    description: &'a str,
    draws: usize,
    seed: u64,
    activation: (usize, usize),
    mean: f64,
    std: f64,
    stderr: f64,
}

pub fn bias(rig: Arc<BlendshapeRig>, args: BiasArgs) -> anyhow::Result<()> {
    let target = targets::by_name(&rig, &args.target)?;
    let config = GaConfig {
        seed: args.seed,
        init_activation_range: args.activation,
        ..GaConfig::default()
    };
    let est = expected_target_bias(&rig, &config, &target.weights, args.draws)?;
    let doc = BiasDoc {
        target: &target.name,
        description: &target.description,
        draws: args.draws,
        seed: args.seed,
        activation: args.activation,
        mean: est.mean,
        std: est.std,
        stderr: est.stderr,
    };
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

#[derive(Debug, Args)]
pub struct ActivationArgs {
    /// Comma-separated LO-HI ranges.
    #[arg(long, value_delimiter = ',', value_parser = parse_range, default_value = "1-3,3-8,8-15")]
    ranges: Vec<(usize, usize)>,
    #[arg(long, default_value = "cd")]
    metric: MetricKind,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 10)]
    generations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn activation(rig: Arc<BlendshapeRig>, args: ActivationArgs) -> anyhow::Result<()> {
    let named: Vec<(String, WeightVector)> = targets::complexity_targets(&rig)?
        .into_iter()
        .map(|t| (t.name, t.weights))
        .collect();
    let suite = suite_for(&rig, args.metric, args.seed)?;
    let base = SimConfig::new(named[0].1.clone(), args.metric)
        .with_repetitions(args.reps)
        .with_generations(args.generations)
        .with_seed(args.seed);
    let rows = activation_study(&suite, &base, &args.ranges, &named)?;
    if let Some(path) = &args.out {
        write_activation_csv(path, &rows)?;
    }
    for r in &rows {
        println!(
            "{}-{} {}: mu0 {:.3} sigma0 {:.3} final {:.3} +- {:.3}",
            r.range.0, r.range.1, r.target, r.mu0, r.sigma0, r.mu_final, r.sigma_final
        );
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct PressureArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Directory receiving default.csv and ranked.csv summaries.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn pressure(rig: Arc<BlendshapeRig>, args: PressureArgs) -> anyhow::Result<()> {
    let (target, mut sim) = args.sim.build(&rig)?;
    sim.pressure = PressureMode::Default;
    let suite = suite_for(&rig, sim.metric, sim.seed)?;
    let default = run_simulation(&suite, &sim)?;
    let ranked = pressure_variant(&suite, &sim)?;
    if let Some(dir) = &args.out {
        out_dir(dir)?;
        write_summary_csv(&dir.join("default.csv"), &default)?;
        write_summary_csv(&dir.join("ranked.csv"), &ranked)?;
    }
    let (d, r) = (default.last(), ranked.last());
    println!("{}: default {:.4} +- {:.4}, ranked {:.4} +- {:.4}", target.name, d.mean, d.std, r.mean, r.std);
    Ok(())
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[arg(long, default_value = "t1")]
    target: String,
    /// Session log whose final elite is compared.
    #[arg(long, conflicts_with = "weights", required_unless_present = "weights")]
    log: Option<PathBuf>,
    /// JSON array of weights to compare.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Mesh of the compared face.
    #[arg(long)]
    obj: PathBuf,
    /// Per-vertex distances in cm.
    #[arg(long)]
    csv: PathBuf,
}

pub fn heatmap(rig: Arc<BlendshapeRig>, args: HeatmapArgs) -> anyhow::Result<()> {
    let target = targets::by_name(&rig, &args.target)?;
    let face: WeightVector = match (&args.log, &args.weights) {
        (Some(p), _) => {
            let log = read_log(p).with_context(|| format!("{}", p.display()))?;
            match log.end.final_elite.clone().or_else(|| log.elites().last().map(|w| (*w).clone())) {
                Some(w) => w,
                None => bail!("{} holds no elite", p.display()),
            }
        }
        (None, Some(p)) => {
            let text = fs::read_to_string(p).with_context(|| format!("{}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("{}", p.display()))?
        }
        (None, None) => bail!("need --log or --weights"),
    };
    let field = heatmap_field(&rig, &face, &target.weights)?;
    let mesh = rig.evaluate(&face)?;
    write_obj(&args.obj, &mesh)?;
    write_scalar_csv(&args.csv, &field)?;
    let max = field.iter().copied().fold(0.0, f64::max);
    let rms = vrtx_rms(&mesh, &rig.evaluate(&target.weights)?)?;
    println!("{} vertices, max distance {max:.4} cm, rms {rms:.4} cm", field.len());
    Ok(())
}
