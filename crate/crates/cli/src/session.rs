use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Subcommand};
use emogen_core::evolution::{replay as replay_log, run_session, GaConfig, ScoredSelection, ScriptedSelector, Selection};
use emogen_core::io::{read_document, read_fixed_sets, read_log, read_rig, write_log, write_rig};
use emogen_core::metrics::MetricKind;
use emogen_core::rig::{generate_synthetic_rig, BlendshapeRig, RigGenParams, WeightVector};
use emogen_simlab::{cd_error, default_schedule, targets, AutoSelector};
use serde::Deserialize;

use crate::sim::suite_for;

pub const RUN_SCHEMA: &str = "emogen-run/1";

#[derive(Debug, Subcommand)]
pub enum RigCommand {
    /// Write a synthetic rig document.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = RigGenParams::default().grid)]
        grid: usize,
        #[arg(long, default_value_t = RigGenParams::default().core_count)]
        cores: usize,
        #[arg(long, default_value_t = RigGenParams::default().seed)]
        seed: u64,
    },
    /// Load a rig document and report its structure.
    Validate { path: PathBuf },
}

pub fn rig(cmd: RigCommand, global: Option<&PathBuf>) -> anyhow::Result<()> {
    match cmd {
        RigCommand::Gen { out, grid, cores, seed } => {
            let rig = generate_synthetic_rig(&RigGenParams {
                grid,
                core_count: cores,
                seed,
            })?;
            write_rig(&out, &rig).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote rig {} to {}", rig.id(), out.display());
            Ok(())
        }
        RigCommand::Validate { path } => {
            if let Some(g) = global {
                log::debug!("ignoring --rig {} in favour of {}", g.display(), path.display());
            }
            let rig = read_rig(&path).with_context(|| format!("{}", path.display()))?;
            println!(
                "rig {}: {} vertices, {} faces, {} shapes, {} unique core genes",
                rig.id(),
                rig.vertex_count(),
                rig.neutral().faces.len(),
                rig.shape_count(),
                rig.unique_core_indices().len()
            );
            Ok(())
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TargetSpec {
    Name(String),
    Weights(WeightVector),
}

/// Body of a run document: a GA configuration and either a target for
/// metric-driven selection or a fixed selection script.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSpec {
    #[serde(default)]
    ga: GaConfig,
    #[serde(default)]
    target: Option<TargetSpec>,
    #[serde(default)]
    metric: Option<MetricKind>,
    #[serde(default)]
    schedule: Option<Vec<usize>>,
    #[serde(default)]
    script: Option<Vec<Selection>>,
    #[serde(default)]
    fixed_sets: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run document.
    #[arg(long)]
    config: PathBuf,
    /// Where the session log is written.
    #[arg(long)]
    log: PathBuf,
}

fn resolve_target(rig: &BlendshapeRig, spec: TargetSpec) -> anyhow::Result<WeightVector> {
    match spec {
        TargetSpec::Name(name) => Ok(targets::by_name(rig, &name)?.weights),
        TargetSpec::Weights(w) => {
            rig.check_weights(&w)?;
            Ok(w)
        }
    }
}

pub fn run(rig: Arc<BlendshapeRig>, args: RunArgs) -> anyhow::Result<()> {
    let spec: RunSpec = read_document(&args.config, RUN_SCHEMA).with_context(|| format!("{}", args.config.display()))?;
    let fixed_sets = match &spec.fixed_sets {
        Some(p) => read_fixed_sets(p).with_context(|| format!("{}", p.display()))?,
        None => Vec::new(),
    };
    let generations = spec.ga.max_generations;
    let (log, target) = match (spec.target, spec.script) {
        (Some(t), None) => {
            let target = resolve_target(&rig, t)?;
            let metric = spec.metric.unwrap_or(MetricKind::Cd);
            let suite = suite_for(&rig, metric, spec.ga.seed)?;
            let prepared = suite.prepare(metric, &target)?;
            let schedule = spec.schedule.unwrap_or_else(|| default_schedule(generations));
            let mut selector = AutoSelector::new(&suite, &prepared, &schedule);
            (run_session(rig.clone(), spec.ga, fixed_sets, &mut selector)?, Some(target))
        }
        (None, Some(script)) => {
            let mut selector = ScriptedSelector::new(
                script
                    .into_iter()
                    .map(|selection| ScoredSelection { selection, scores: None })
                    .collect(),
            );
            (run_session(rig.clone(), spec.ga, fixed_sets, &mut selector)?, None)
        }
        _ => bail!("a run document needs exactly one of 'target' and 'script'"),
    };
    write_log(&args.log, &log).with_context(|| format!("writing {}", args.log.display()))?;
    let executed = log.generations().len();
    print!("session {:?} after {executed} generation records", log.end.status);
    if let (Some(t), Some(elite)) = (&target, &log.end.final_elite) {
        print!(", final elite CD error {:.4}", cd_error(t, elite));
    }
    println!();
    if let Some(reason) = &log.end.abort {
        bail!("session aborted: {reason}");
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    log: PathBuf,
}

pub fn replay(rig: Arc<BlendshapeRig>, args: ReplayArgs) -> anyhow::Result<()> {
    let log = read_log(&args.log).with_context(|| format!("{}", args.log.display()))?;
    let rerun = replay_log(rig, &log)?;
    let generations = log.generations().len();
    if rerun != log {
        let diverged = log
            .generations()
            .iter()
            .zip(rerun.generations())
            .position(|(a, b)| *a != b)
            .unwrap_or(generations.min(rerun.generations().len()));
        bail!("replay diverges from the log at generation record {diverged}");
    }
    println!("replay reproduces all {generations} generation records");
    Ok(())
}
