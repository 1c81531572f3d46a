use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use emogen_core::evolution::Session;
use emogen_core::rig::BlendshapeRig;

/// Rigs sessions may be created on, keyed by rig id.
#[derive(Debug, Clone, Default)]
pub struct RigRegistry {
    rigs: HashMap<String, Arc<BlendshapeRig>>,
    default: Option<String>,
}

impl RigRegistry {
    /// Adds `rig`; the first rig added becomes the default.
    pub fn insert(&mut self, rig: Arc<BlendshapeRig>) {
        let id = rig.id().to_string();
        self.default.get_or_insert_with(|| id.clone());
        self.rigs.insert(id, rig);
    }

    pub fn get(&self, id: Option<&str>) -> Option<&Arc<BlendshapeRig>> {
        self.rigs.get(id.or(self.default.as_deref())?)
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.rigs.keys().cloned().collect();
        ids.sort();
        ids
    }
}

pub(crate) struct Entry {
    pub rig: String,
    pub session: Session,
}

/// Shared service state. Each session sits behind its own lock so sessions
/// progress independently.
#[derive(Clone)]
pub struct AppState {
    pub(crate) rigs: Arc<RigRegistry>,
    pub(crate) sessions: Arc<RwLock<HashMap<String, Arc<Mutex<Entry>>>>>,
    pub(crate) log_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(rigs: RigRegistry) -> Self {
        AppState {
            rigs: Arc::new(rigs),
            sessions: Arc::default(),
            log_dir: None,
        }
    }

    /// Writes each session's log to `dir/<id>.jsonl` after every change.
    pub fn with_log_dir(mut self, dir: PathBuf) -> Self {
        self.log_dir = Some(dir);
        self
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("session table lock").len()
    }
}
