use serde::{Deserialize, Serialize};

use crate::collision::CorrectionParams;
use crate::rig::WeightVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// One of the pre-authored sets supplied with the session.
    Fixed,
    /// Two faces per emotion, one arbitrary face and the neutral.
    Protocol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedChoice {
    Index(usize),
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureMode {
    /// Parents drawn uniformly with replacement from the selection.
    Default,
    /// Parents paired by selection rank, each pair breeding once into two children.
    Ranked,
}

/// A named initial population read from a fixed-initialization file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedSet {
    pub name: String,
    pub members: Vec<WeightVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub max_generations: usize,
    pub population_size: usize,
    pub mutation_genes: usize,
    pub random_boost_count: usize,
    pub random_gen_active: usize,
    pub init_mode: InitMode,
    pub fixed_init: FixedChoice,
    pub reinit_on_reset: bool,
    pub min_selections: usize,
    pub max_selections: usize,
    pub disable_eyes: bool,
    pub disable_pupils: bool,
    pub seed: u64,
    /// ChaCha stream of the session generator; simulations use the repetition index.
    pub stream: u64,
    pub init_activation_range: (usize, usize),
    pub pressure: PressureMode,
    pub correction: CorrectionParams,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            max_generations: 10,
            population_size: 10,
            mutation_genes: 2,
            random_boost_count: 4,
            random_gen_active: 6,
            init_mode: InitMode::Protocol,
            fixed_init: FixedChoice::Random,
            reinit_on_reset: true,
            min_selections: 1,
            max_selections: 10,
            disable_eyes: false,
            disable_pupils: false,
            seed: 0,
            stream: 0,
            init_activation_range: (3, 8),
            pressure: PressureMode::Default,
            correction: CorrectionParams::default(),
        }
    }
}

impl GaConfig {
    /// Checks the rig-independent invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.population_size < self.random_boost_count + 3 {
            return bad(format!(
                "population_size {} leaves no room for elite, averages and children next to {} random members",
                self.population_size, self.random_boost_count
            ));
        }
        if !(1 <= self.min_selections
            && self.min_selections <= self.max_selections
            && self.max_selections <= self.population_size)
        {
            return bad(format!(
                "selection bounds must satisfy 1 <= min ({}) <= max ({}) <= population size ({})",
                self.min_selections, self.max_selections, self.population_size
            ));
        }
        let (lo, hi) = self.init_activation_range;
        if lo == 0 || lo > hi {
            return bad(format!("invalid init activation range ({lo}, {hi})"));
        }
        if !(0.0..=1.0).contains(&self.correction.w1) {
            return bad(format!("correction w1 {} outside [0, 1]", self.correction.w1));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        GaConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_inverted_selection_bounds() {
        let cfg = GaConfig {
            min_selections: 5,
            max_selections: 3,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
