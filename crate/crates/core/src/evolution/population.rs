use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{FixedChoice, FixedSet, GaConfig, InitMode, PressureMode};
use super::operators::{self, GeneSpace};
use crate::collision::{correct_face, CorrectionResult};
use crate::rig::{BlendshapeRig, Emotion, WeightVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InitKind {
    Emotion { emotion: Emotion },
    Arbitrary,
    Neutral,
    Fixed { set: String },
}

/// How a population member came to be. Indices refer to the previous
/// generation's members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Provenance {
    Init { init: InitKind },
    EliteCarry { from: usize },
    AverageAll { parents: Vec<usize> },
    AverageElitePair { parents: [usize; 2] },
    /// Crossover of two selections followed by mutation. Without two distinct
    /// parents `crossover` is false and the first parent was only mutated.
    Child { parents: [usize; 2], crossover: bool, mutated: Vec<usize> },
    /// One of the two children of a rank-paired crossover.
    RankedChild { parents: [usize; 2], mutated: Vec<usize> },
    Random { active: Vec<usize> },
    Carry { from: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub weights: WeightVector,
    pub provenance: Provenance,
    pub correction: CorrectionResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub generation: usize,
    pub members: Vec<Member>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weights(&self, i: usize) -> &WeightVector {
        &self.members[i].weights
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub elite: usize,
    pub others: Vec<usize>,
}

impl Selection {
    pub fn new(elite: usize, others: Vec<usize>) -> Self {
        Selection { elite, others }
    }

    pub fn count(&self) -> usize {
        self.others.len() + 1
    }

    /// Elite followed by the other selections, in submitted order.
    pub fn all(&self) -> Vec<usize> {
        std::iter::once(self.elite).chain(self.others.iter().copied()).collect()
    }

    pub fn validate(&self, population_size: usize, min: usize, max: usize) -> Result<()> {
        let all = self.all();
        if let Some(i) = all.iter().find(|&&i| i >= population_size) {
            return Err(Error::invalid(format!(
                "selected member {i} outside population of {population_size}"
            )));
        }
        if self.others.contains(&self.elite) {
            return Err(Error::invalid("the elite must not also appear among the other selections"));
        }
        let mut sorted = self.others.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::invalid("duplicate member in selection"));
        }
        if !(min..=max).contains(&all.len()) {
            return Err(Error::invalid(format!(
                "{} selections outside the allowed range [{min}, {max}]",
                all.len()
            )));
        }
        Ok(())
    }
}

/// Rig, configuration and gene space shared by every step of a session.
#[derive(Debug, Clone)]
pub struct Engine {
    rig: Arc<BlendshapeRig>,
    config: GaConfig,
    space: GeneSpace,
}

impl Engine {
    pub fn new(rig: Arc<BlendshapeRig>, config: GaConfig) -> Result<Self> {
        config.validate()?;
        let space = GeneSpace::new(&rig, config.disable_eyes, config.disable_pupils);
        let n = space.genes().len();
        let (_, hi) = config.init_activation_range;
        for (what, k) in [
            ("mutation_genes", config.mutation_genes),
            ("random_gen_active", config.random_gen_active),
            ("init_activation_range upper bound", hi),
        ] {
            if k > n {
                return Err(Error::Config(format!(
                    "{what} = {k} exceeds the {n} evolvable core shapes"
                )));
            }
        }
        Ok(Engine { rig, config, space })
    }

    pub fn rig(&self) -> &Arc<BlendshapeRig> {
        &self.rig
    }

    pub fn config(&self) -> &GaConfig {
        &self.config
    }

    pub fn space(&self) -> &GeneSpace {
        &self.space
    }

    /// Turns a gene vector into a valid face: non-gene entries zeroed,
    /// symmetry enforced, combinational and collision correctives computed.
    pub fn finalize(&self, genes: &WeightVector, provenance: Provenance) -> Result<Member> {
        let w = self.rig.complete(&self.space.restrict(genes));
        let (weights, correction) = correct_face(&self.rig, &w, &self.config.correction)?;
        Ok(Member {
            weights,
            provenance,
            correction,
        })
    }

    /// Two faces per emotion from that emotion's shapes, one arbitrary face
    /// and the neutral. Active-gene counts are drawn from the configured
    /// range and capped by the size of the emotion's evolvable subset.
    pub fn protocol_init<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Population> {
        let (lo, hi) = self.config.init_activation_range;
        let mut members = Vec::with_capacity(self.config.population_size);
        for emotion in Emotion::ALL {
            let subset: Vec<usize> = self
                .rig
                .emotion_subsets()
                .get(&emotion)
                .ok_or_else(|| Error::Config(format!("missing emotion subset '{emotion}'")))?
                .iter()
                .copied()
                .filter(|i| self.space.genes().contains(i))
                .collect();
            if subset.is_empty() {
                return Err(Error::Config(format!(
                    "emotion subset '{emotion}' has no evolvable shapes"
                )));
            }
            for _ in 0..2 {
                let k = rng.random_range(lo..=hi).min(subset.len());
                let (genes, _) = operators::random_from(self.space.shape_count(), &subset, k, rng)?;
                members.push(self.finalize(
                    &genes,
                    Provenance::Init {
                        init: InitKind::Emotion { emotion },
                    },
                )?);
            }
        }
        let k = rng.random_range(lo..=hi);
        let (genes, _) = operators::random_member(&self.space, k, rng)?;
        members.push(self.finalize(&genes, Provenance::Init { init: InitKind::Arbitrary })?);
        members.push(self.finalize(&self.rig.zeros(), Provenance::Init { init: InitKind::Neutral })?);
        if members.len() != self.config.population_size {
            return Err(Error::Config(format!(
                "protocol initialization yields 10 members but population_size is {}",
                self.config.population_size
            )));
        }
        Ok(Population {
            generation: 0,
            members,
        })
    }

    pub fn fixed_init<R: Rng + ?Sized>(&self, sets: &[FixedSet], rng: &mut R) -> Result<Population> {
        if sets.is_empty() {
            return Err(Error::Config("fixed initialization requested without any sets".into()));
        }
        let index = match self.config.fixed_init {
            FixedChoice::Index(i) => i,
            FixedChoice::Random => rng.random_range(0..sets.len()),
        };
        let set = sets.get(index).ok_or_else(|| {
            Error::Config(format!("fixed set {index} requested but only {} exist", sets.len()))
        })?;
        if set.members.len() != self.config.population_size {
            return Err(Error::Config(format!(
                "fixed set '{}' has {} members, expected {}",
                set.name,
                set.members.len(),
                self.config.population_size
            )));
        }
        let members = set
            .members
            .iter()
            .map(|w| {
                self.rig.check_weights(w)?;
                self.finalize(
                    w,
                    Provenance::Init {
                        init: InitKind::Fixed {
                            set: set.name.clone(),
                        },
                    },
                )
            })
            .collect::<Result<_>>()?;
        Ok(Population {
            generation: 0,
            members,
        })
    }

    pub fn initialize<R: Rng + ?Sized>(&self, sets: &[FixedSet], rng: &mut R) -> Result<Population> {
        match self.config.init_mode {
            InitMode::Protocol => self.protocol_init(rng),
            InitMode::Fixed => self.fixed_init(sets, rng),
        }
    }

    /// Breeds generation `g + 1` from generation `g` and its selection.
    ///
    /// Slot 1 carries the elite. Slot 2 averages all selections when there
    /// are more than two. Slot 3, outside generations 1 and 2, averages the
    /// elite with one random other selection, or carries the previous slot 3
    /// when the elite was the only selection. Remaining slots before the
    /// random tail are mutated crossover children; the tail holds fresh
    /// random members.
    pub fn advance<R: Rng + ?Sized>(
        &self,
        pop: &Population,
        sel: &Selection,
        rng: &mut R,
    ) -> Result<Population> {
        let cfg = &self.config;
        sel.validate(pop.len(), cfg.min_selections, cfg.max_selections)?;
        let g = pop.generation;
        let chosen = sel.all();
        let size = cfg.population_size;
        let random_start = size - cfg.random_boost_count;
        let mut members: Vec<Option<Member>> = vec![None; size];

        members[0] = Some(Member {
            provenance: Provenance::EliteCarry { from: sel.elite },
            ..pop.members[sel.elite].clone()
        });

        let mut child_slots = Vec::new();
        if chosen.len() > 2 {
            let set: Vec<&WeightVector> = chosen.iter().map(|&i| pop.weights(i)).collect();
            let genes = operators::average(&self.space, &set)?;
            members[1] = Some(self.finalize(&genes, Provenance::AverageAll { parents: chosen.clone() })?);
        } else {
            child_slots.push(1);
        }

        if g != 1 && g != 2 {
            if sel.others.is_empty() {
                members[2] = Some(Member {
                    provenance: Provenance::Carry { from: 2 },
                    ..pop.members[2].clone()
                });
            } else {
                let other = sel.others[rng.random_range(0..sel.others.len())];
                let genes = operators::average(&self.space, &[pop.weights(sel.elite), pop.weights(other)])?;
                members[2] = Some(self.finalize(
                    &genes,
                    Provenance::AverageElitePair {
                        parents: [sel.elite, other],
                    },
                )?);
            }
        } else {
            child_slots.push(2);
        }
        child_slots.extend(3..random_start);

        match cfg.pressure {
            PressureMode::Default => {
                for slot in child_slots {
                    members[slot] = Some(self.child(pop, sel, &chosen, rng)?);
                }
            }
            PressureMode::Ranked => {
                let children = self.ranked_children(pop, sel, &chosen, child_slots.len(), rng)?;
                for (slot, child) in child_slots.into_iter().zip(children) {
                    members[slot] = Some(child);
                }
            }
        }

        for slot in members.iter_mut().skip(random_start) {
            let (genes, active) = operators::random_member(&self.space, cfg.random_gen_active, rng)?;
            *slot = Some(self.finalize(&genes, Provenance::Random { active })?);
        }

        Ok(Population {
            generation: g + 1,
            members: members.into_iter().map(|m| m.expect("every slot filled")).collect(),
        })
    }

    fn child<R: Rng + ?Sized>(
        &self,
        pop: &Population,
        sel: &Selection,
        chosen: &[usize],
        rng: &mut R,
    ) -> Result<Member> {
        let m = self.config.mutation_genes;
        let distinct = chosen
            .iter()
            .any(|&i| self.space.differ(pop.weights(i), pop.weights(sel.elite)));
        if !distinct {
            let (genes, mutated) = operators::mutate(&self.space, pop.weights(sel.elite), m, rng)?;
            return self.finalize(
                &genes,
                Provenance::Child {
                    parents: [sel.elite, sel.elite],
                    crossover: false,
                    mutated,
                },
            );
        }
        let (s, t) = loop {
            let s = chosen[rng.random_range(0..chosen.len())];
            let t = chosen[rng.random_range(0..chosen.len())];
            if self.space.differ(pop.weights(s), pop.weights(t)) {
                break (s, t);
            }
        };
        let child = operators::crossover(&self.space, pop.weights(s), pop.weights(t), rng)?;
        let (genes, mutated) = operators::mutate(&self.space, &child, m, rng)?;
        self.finalize(
            &genes,
            Provenance::Child {
                parents: [s, t],
                crossover: true,
                mutated,
            },
        )
    }

    /// Rank pairs `(1st, 2nd)`, `(3rd, 4th)`, ... of the selection each breed
    /// once into two complementary mutated children. Slots left over after
    /// all pairs have bred take mutated copies of the elite.
    fn ranked_children<R: Rng + ?Sized>(
        &self,
        pop: &Population,
        sel: &Selection,
        chosen: &[usize],
        slots: usize,
        rng: &mut R,
    ) -> Result<Vec<Member>> {
        let m = self.config.mutation_genes;
        let mut out = Vec::with_capacity(slots);
        for pair in chosen.chunks_exact(2) {
            if out.len() >= slots {
                break;
            }
            let (a, b) = (pair[0], pair[1]);
            let (first, second) = if self.space.differ(pop.weights(a), pop.weights(b)) {
                operators::crossover_pair(&self.space, pop.weights(a), pop.weights(b), rng)?
            } else {
                (pop.weights(a).clone(), pop.weights(b).clone())
            };
            for child in [first, second] {
                if out.len() >= slots {
                    break;
                }
                let (genes, mutated) = operators::mutate(&self.space, &child, m, rng)?;
                out.push(self.finalize(&genes, Provenance::RankedChild { parents: [a, b], mutated })?);
            }
        }
        while out.len() < slots {
            let (genes, mutated) = operators::mutate(&self.space, pop.weights(sel.elite), m, rng)?;
            out.push(self.finalize(
                &genes,
                Provenance::Child {
                    parents: [sel.elite, sel.elite],
                    crossover: false,
                    mutated,
                },
            )?);
        }
        Ok(out)
    }
}
