//! The expression-evolution genetic algorithm and step-wise sessions.

mod config;
pub mod operators;
mod population;
mod session;

pub use config::{FixedChoice, FixedSet, GaConfig, InitMode, PressureMode};
pub use operators::GeneSpace;
pub use population::{Engine, InitKind, Member, Population, Provenance, Selection};
pub use session::{
    replay, run_session, Advance, GenerationRecord, LogEnd, LogEntry, LogHeader, ScoredSelection,
    ScriptedSelector, Selector, Session, SessionLog, SessionState, SessionStatus, LOG_SCHEMA,
};
