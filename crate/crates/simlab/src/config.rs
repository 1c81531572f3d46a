use emogen_core::evolution::{FixedSet, GaConfig, InitMode, PressureMode};
use emogen_core::metrics::MetricKind;
use emogen_core::rig::WeightVector;
use emogen_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Selections per generation: 2 at initialization, 4 for generations 1-5
/// and 5 afterwards.
pub fn default_schedule(generations: usize) -> Vec<usize> {
    (0..=generations)
        .map(|g| match g {
            0 => 2,
            1..=5 => 4,
            _ => 5,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub target: WeightVector,
    pub metric: MetricKind,
    pub repetitions: usize,
    pub generations: usize,
    /// Selection count for each generation `0..=generations`.
    pub schedule: Vec<usize>,
    pub init_mode: InitMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed_sets: Vec<FixedSet>,
    pub seed: u64,
    pub pressure: PressureMode,
    pub init_activation_range: (usize, usize),
}

impl SimConfig {
    pub fn new(target: WeightVector, metric: MetricKind) -> Self {
        SimConfig {
            target,
            metric,
            repetitions: 500,
            generations: 10,
            schedule: default_schedule(10),
            init_mode: InitMode::Protocol,
            fixed_sets: Vec::new(),
            seed: 0,
            pressure: PressureMode::Default,
            init_activation_range: (3, 8),
        }
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn with_generations(mut self, generations: usize) -> Self {
        self.generations = generations;
        self.schedule = default_schedule(generations);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("a simulation needs at least one repetition".into()));
        }
        if self.schedule.len() != self.generations + 1 {
            return Err(Error::Config(format!(
                "schedule has {} entries for {} generations",
                self.schedule.len(),
                self.generations
            )));
        }
        if let Some(c) = self.schedule.iter().find(|&&c| !(1..=10).contains(&c)) {
            return Err(Error::Config(format!("selection count {c} outside [1, 10]")));
        }
        Ok(())
    }

    /// Session configuration of repetition `rep`: the master seed with the
    /// repetition index as generator stream.
    pub fn ga_config(&self, rep: usize) -> GaConfig {
        GaConfig {
            max_generations: self.generations,
            init_mode: self.init_mode,
            seed: self.seed,
            stream: rep as u64,
            pressure: self.pressure,
            init_activation_range: self.init_activation_range,
            ..GaConfig::default()
        }
    }
}
