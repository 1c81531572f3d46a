use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{FixedSet, GaConfig};
use super::population::{Engine, Population, Selection};
use crate::rig::{BlendshapeRig, WeightVector};
use crate::{Error, Result};

pub const LOG_SCHEMA: &str = "emogen-log/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema: String,
    pub rig_id: String,
    pub config: GaConfig,
    /// Sets available for fixed initialization, kept for replay.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed_sets: Vec<FixedSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub population: Population,
    pub selection: Option<Selection>,
    /// Selector distances per member when selection was automated; `None`
    /// entries mark members the metric was undefined for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogEntry {
    Generation(GenerationRecord),
    /// The GA was reset to generation 0; a new generation-0 record follows.
    Reset { reinitialized: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Open,
    Complete,
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEnd {
    pub status: SessionStatus,
    pub final_elite: Option<WeightVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort: Option<String>,
}

/// Everything a session did, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub header: LogHeader,
    pub entries: Vec<LogEntry>,
    pub end: LogEnd,
}

impl SessionLog {
    /// Generation records since the most recent reset.
    pub fn generations(&self) -> Vec<&GenerationRecord> {
        let start = self
            .entries
            .iter()
            .rposition(|e| matches!(e, LogEntry::Reset { .. }))
            .map_or(0, |i| i + 1);
        self.entries[start..]
            .iter()
            .filter_map(|e| match e {
                LogEntry::Generation(r) => Some(r),
                LogEntry::Reset { .. } => None,
            })
            .collect()
    }

    /// Elite weights of every selected generation since the last reset.
    pub fn elites(&self) -> Vec<&WeightVector> {
        self.generations()
            .into_iter()
            .filter_map(|r| r.selection.as_ref().map(|s| r.population.weights(s.elite)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    AwaitingSelection,
    Advancing,
    Finished,
    Aborted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Advance<'a> {
    Next(&'a Population),
    Finished(&'a WeightVector),
}

/// Step-wise GA session: one generator, one population awaiting selection.
#[derive(Debug, Clone)]
pub struct Session {
    engine: Engine,
    rng: ChaCha8Rng,
    state: SessionState,
    current: Population,
    initial: Population,
    log: SessionLog,
}

impl Session {
    pub fn new(rig: Arc<BlendshapeRig>, config: GaConfig, fixed_sets: Vec<FixedSet>) -> Result<Self> {
        let engine = Engine::new(rig, config)?;
        let cfg = engine.config();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(cfg.stream);
        let current = engine.initialize(&fixed_sets, &mut rng)?;
        let log = SessionLog {
            header: LogHeader {
                schema: LOG_SCHEMA.into(),
                rig_id: engine.rig().id().to_string(),
                config: cfg.clone(),
                fixed_sets,
            },
            entries: vec![LogEntry::Generation(GenerationRecord {
                population: current.clone(),
                selection: None,
                scores: None,
            })],
            end: LogEnd {
                status: SessionStatus::Open,
                final_elite: None,
                abort: None,
            },
        };
        Ok(Session {
            engine,
            rng,
            state: SessionState::AwaitingSelection,
            initial: current.clone(),
            current,
            log,
        })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn config(&self) -> &GaConfig {
        self.engine.config()
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn generation(&self) -> usize {
        self.current.generation
    }

    pub fn population(&self) -> &Population {
        &self.current
    }

    pub fn log(&self) -> &SessionLog {
        &self.log
    }

    pub fn into_log(self) -> SessionLog {
        self.log
    }

    pub fn final_elite(&self) -> Option<&WeightVector> {
        self.log.end.final_elite.as_ref()
    }

    pub fn submit(&mut self, selection: Selection) -> Result<Advance<'_>> {
        self.submit_scored(selection, None)
    }

    /// Records the selection for the current generation. Below the final
    /// generation the next population is bred; at the final generation the
    /// session finishes with the selected elite.
    pub fn submit_scored(
        &mut self,
        selection: Selection,
        scores: Option<Vec<Option<f64>>>,
    ) -> Result<Advance<'_>> {
        if self.state != SessionState::AwaitingSelection {
            return Err(Error::invalid(format!("session is {:?}", self.state)));
        }
        let cfg = self.engine.config();
        selection.validate(self.current.len(), cfg.min_selections, cfg.max_selections)?;
        let record = match self.log.entries.last_mut() {
            Some(LogEntry::Generation(r)) => r,
            _ => unreachable!("the current generation is always the last log entry"),
        };
        record.selection = Some(selection.clone());
        record.scores = scores;

        if self.current.generation >= cfg.max_generations {
            let elite = self.current.weights(selection.elite).clone();
            self.log.end = LogEnd {
                status: SessionStatus::Complete,
                final_elite: Some(elite),
                abort: None,
            };
            self.state = SessionState::Finished;
            return Ok(Advance::Finished(self.log.end.final_elite.as_ref().expect("just set")));
        }

        self.state = SessionState::Advancing;
        let next = match self.engine.advance(&self.current, &selection, &mut self.rng) {
            Ok(p) => p,
            Err(e) => {
                self.state = SessionState::AwaitingSelection;
                if let Some(LogEntry::Generation(r)) = self.log.entries.last_mut() {
                    r.selection = None;
                    r.scores = None;
                }
                return Err(e);
            }
        };
        self.log.entries.push(LogEntry::Generation(GenerationRecord {
            population: next.clone(),
            selection: None,
            scores: None,
        }));
        self.current = next;
        self.state = SessionState::AwaitingSelection;
        Ok(Advance::Next(&self.current))
    }

    pub fn abort(&mut self, reason: impl Into<String>) {
        self.state = SessionState::Aborted;
        self.log.end = LogEnd {
            status: SessionStatus::Aborted,
            final_elite: None,
            abort: Some(reason.into()),
        };
    }

    /// Returns to generation 0, either with a fresh initialization or the
    /// original one depending on `reinit_on_reset`.
    pub fn reset(&mut self) -> Result<()> {
        if self.state == SessionState::Aborted {
            return Err(Error::invalid("aborted sessions cannot be reset"));
        }
        let reinit = self.engine.config().reinit_on_reset;
        if reinit {
            self.initial = self
                .engine
                .initialize(&self.log.header.fixed_sets, &mut self.rng)?;
        }
        self.current = self.initial.clone();
        self.log.entries.push(LogEntry::Reset { reinitialized: reinit });
        self.log.entries.push(LogEntry::Generation(GenerationRecord {
            population: self.current.clone(),
            selection: None,
            scores: None,
        }));
        self.log.end = LogEnd {
            status: SessionStatus::Open,
            final_elite: None,
            abort: None,
        };
        self.state = SessionState::AwaitingSelection;
        Ok(())
    }
}

/// A selection together with optional per-member scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSelection {
    pub selection: Selection,
    pub scores: Option<Vec<Option<f64>>>,
}

/// Source of selections for [`run_session`]: a person behind the service or
/// an automated metric.
pub trait Selector {
    /// Returns the selection for `population`, or `Err(reason)` to abort.
    fn select(&mut self, population: &Population) -> std::result::Result<ScoredSelection, String>;
}

/// Runs a complete session, returning the log. A selector abort ends the
/// session early with an abort marker rather than an error.
pub fn run_session(
    rig: Arc<BlendshapeRig>,
    config: GaConfig,
    fixed_sets: Vec<FixedSet>,
    selector: &mut dyn Selector,
) -> Result<SessionLog> {
    let mut session = Session::new(rig, config, fixed_sets)?;
    loop {
        match selector.select(session.population()) {
            Ok(s) => {
                if let Advance::Finished(_) = session.submit_scored(s.selection, s.scores)? {
                    break;
                }
            }
            Err(reason) => {
                session.abort(reason);
                break;
            }
        }
    }
    Ok(session.into_log())
}

/// Replays the selections recorded in a log, in order.
#[derive(Debug, Clone)]
pub struct ScriptedSelector {
    script: std::vec::IntoIter<ScoredSelection>,
}

impl ScriptedSelector {
    pub fn new(selections: Vec<ScoredSelection>) -> Self {
        ScriptedSelector {
            script: selections.into_iter(),
        }
    }
}

impl Selector for ScriptedSelector {
    fn select(&mut self, _: &Population) -> std::result::Result<ScoredSelection, String> {
        self.script
            .next()
            .ok_or_else(|| "selection script exhausted".to_string())
    }
}

/// Re-runs a logged session from its header, feeding back the logged
/// selections and resets. The result equals the input for a faithful log.
pub fn replay(rig: Arc<BlendshapeRig>, log: &SessionLog) -> Result<SessionLog> {
    if log.header.rig_id != rig.id() {
        return Err(Error::invalid(format!(
            "log was recorded on rig '{}' but '{}' was supplied",
            log.header.rig_id,
            rig.id()
        )));
    }
    let mut session = Session::new(rig, log.header.config.clone(), log.header.fixed_sets.clone())?;
    let mut first = true;
    for entry in &log.entries {
        match entry {
            LogEntry::Reset { .. } => {
                session.reset()?;
                first = true;
            }
            LogEntry::Generation(record) => {
                if !first && session.generation() != record.population.generation {
                    return Err(Error::invalid("log generations are out of order"));
                }
                first = false;
                if let Some(sel) = &record.selection {
                    session.submit_scored(sel.clone(), record.scores.clone())?;
                }
            }
        }
    }
    if log.end.status == SessionStatus::Aborted {
        session.abort(log.end.abort.clone().unwrap_or_default());
    }
    Ok(session.into_log())
}
