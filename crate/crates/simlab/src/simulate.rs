use emogen_core::evolution::{run_session, SessionLog, SessionStatus};
use emogen_core::metrics::{cd_weights, MetricSuite, PreparedTarget};
use emogen_core::rig::WeightVector;
use emogen_core::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::select::AutoSelector;
use crate::stats::mean_std;

/// Cosine-distance error of `elite` against `target`. A zero-norm elite
/// shares no composition with any target and scores the maximum of 1.
pub fn cd_error(target: &WeightVector, elite: &WeightVector) -> f64 {
    cd_weights(target, elite).unwrap_or(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Elite-to-target cosine distance of every successful repetition.
    pub errors: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

/// One simulated session reduced to its per-generation elites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repetition {
    pub index: usize,
    pub elites: Vec<WeightVector>,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionStats {
    pub generations: Vec<GenerationStats>,
    pub repetitions: Vec<Repetition>,
    /// Repetitions that ended early, with the reason.
    pub failed: Vec<(usize, String)>,
}

impl DistributionStats {
    pub fn initial(&self) -> &GenerationStats {
        &self.generations[0]
    }

    pub fn last(&self) -> &GenerationStats {
        self.generations.last().expect("at least generation 0")
    }

    /// Elites of the final generation, one per successful repetition.
    pub fn final_elites(&self) -> Vec<&WeightVector> {
        self.repetitions
            .iter()
            .map(|r| r.elites.last().expect("at least one elite"))
            .collect()
    }
}

/// Runs repetition `rep` of `sim` and returns its session log.
pub fn simulate_repetition(
    suite: &MetricSuite,
    sim: &SimConfig,
    target: &PreparedTarget,
    rep: usize,
) -> Result<SessionLog> {
    let mut selector = AutoSelector::new(suite, target, &sim.schedule);
    run_session(
        suite.rig().clone(),
        sim.ga_config(rep),
        sim.fixed_sets.clone(),
        &mut selector,
    )
}

/// Runs every repetition of `sim` on the worker pool and collects the
/// per-generation elite error distributions.
pub fn run_simulation(suite: &MetricSuite, sim: &SimConfig) -> Result<DistributionStats> {
    sim.validate()?;
    let target = suite.prepare(sim.metric, &sim.target)?;
    let outcomes: Vec<Result<SessionLog>> = (0..sim.repetitions)
        .into_par_iter()
        .map(|rep| simulate_repetition(suite, sim, &target, rep))
        .collect();

    let mut repetitions = Vec::new();
    let mut failed = Vec::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(log) if log.end.status == SessionStatus::Complete => {
                let elites: Vec<WeightVector> = log.elites().into_iter().cloned().collect();
                let errors = elites.iter().map(|e| cd_error(&sim.target, e)).collect();
                repetitions.push(Repetition {
                    index,
                    elites,
                    errors,
                });
            }
            Ok(log) => failed.push((index, log.end.abort.unwrap_or_else(|| "incomplete".into()))),
            Err(e) => failed.push((index, e.to_string())),
        }
    }
    if repetitions.is_empty() {
        let reason = failed.first().map(|f| f.1.clone()).unwrap_or_default();
        return Err(Error::Numerical(format!("every repetition failed: {reason}")));
    }
    if !failed.is_empty() {
        log::warn!("{} of {} repetitions failed", failed.len(), sim.repetitions);
    }
    let generations = (0..=sim.generations)
        .map(|g| {
            let errors: Vec<f64> = repetitions.iter().map(|r| r.errors[g]).collect();
            let (mean, std) = mean_std(&errors);
            GenerationStats {
                generation: g,
                errors,
                mean,
                std,
            }
        })
        .collect();
    Ok(DistributionStats {
        generations,
        repetitions,
        failed,
    })
}
