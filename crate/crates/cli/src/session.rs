//! Game sessions, kept in memory and optionally mirrored to one JSON file
//! per session.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use iqgame::game::{Game, GameError, GameState, Move};
use iqgame::scenario::{Scenario, ScenarioError, ScenarioFile};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed session file {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("session history does not replay: {0}")]
    Replay(#[from] GameError),
    #[error("session {0}: stored state differs from the replayed history")]
    StateMismatch(String),
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Io { .. } => "io",
            SessionError::Json { .. } => "schema",
            SessionError::Scenario(e) => e.code(),
            SessionError::Replay(e) => e.code(),
            SessionError::StateMismatch(_) => "state_mismatch",
        }
    }
}

/// On-disk form of a session. The move history is authoritative; the state
/// is stored for readers and checked on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub created_at: u64,
    pub scenario: ScenarioFile,
    pub moves: Vec<Move>,
    pub state: GameState,
}

impl SessionRecord {
    pub fn read(path: &Path) -> Result<SessionRecord, SessionError> {
        let text = fs::read_to_string(path).map_err(|source| SessionError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| SessionError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub created_at: u64,
    pub game: Game,
}

impl Session {
    pub fn new(scenario: Arc<Scenario>) -> Result<Session, GameError> {
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(Session {
            id: uuid::Uuid::new_v4().to_string(),
            created_at,
            game: Game::new(scenario)?,
        })
    }

    pub fn record(&self) -> SessionRecord {
        SessionRecord {
            id: self.id.clone(),
            created_at: self.created_at,
            scenario: ScenarioFile::from_scenario(self.game.scenario()),
            moves: self.game.history().to_vec(),
            state: self.game.state().clone(),
        }
    }

    /// Rebuilds a session by replaying its history.
    pub fn from_record(record: SessionRecord) -> Result<Session, SessionError> {
        let scenario = Arc::new(record.scenario.into_scenario()?);
        let game = Game::resume(scenario, &record.moves)?;
        if *game.state() != record.state {
            return Err(SessionError::StateMismatch(record.id));
        }
        Ok(Session {
            id: record.id,
            created_at: record.created_at,
            game,
        })
    }
}

pub type SharedSession = Arc<Mutex<Session>>;

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, SharedSession>>,
    dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn in_memory() -> Self {
        SessionStore::default()
    }

    /// A store persisted under `dir`; sessions already there are resumed.
    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| SessionError::Io {
            path: dir.clone(),
            source,
        })?;
        let mut sessions = HashMap::new();
        let entries = fs::read_dir(&dir).map_err(|source| SessionError::Io {
            path: dir.clone(),
            source,
        })?;
        for entry in entries.flatten() {
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let session = Session::from_record(SessionRecord::read(&path)?)?;
            sessions.insert(session.id.clone(), Arc::new(Mutex::new(session)));
        }
        Ok(SessionStore {
            sessions: RwLock::new(sessions),
            dir: Some(dir),
        })
    }

    pub fn create(&self, scenario: Arc<Scenario>) -> Result<SharedSession, SessionError> {
        let session = Session::new(scenario)?;
        self.save(&session)?;
        let id = session.id.clone();
        let shared = Arc::new(Mutex::new(session));
        self.sessions.write().unwrap().insert(id, shared.clone());
        Ok(shared)
    }

    pub fn get(&self, id: &str) -> Option<SharedSession> {
        self.sessions.read().unwrap().get(id).cloned()
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().unwrap().keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn remove(&self, id: &str) -> Result<bool, SessionError> {
        let removed = self.sessions.write().unwrap().remove(id).is_some();
        if removed {
            if let Some(path) = self.path_for(id) {
                match fs::remove_file(&path) {
                    Ok(()) => {}
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                    Err(source) => return Err(SessionError::Io { path, source }),
                }
            }
        }
        Ok(removed)
    }

    fn path_for(&self, id: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{id}.json")))
    }

    /// Writes the session file, if this store is persistent.
    pub fn save(&self, session: &Session) -> Result<(), SessionError> {
        let Some(path) = self.path_for(&session.id) else {
            return Ok(());
        };
        let json = serde_json::to_string_pretty(&session.record()).expect("session serializes");
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, json)
            .and_then(|()| fs::rename(&tmp, &path))
            .map_err(|source| SessionError::Io { path, source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use iqgame::builtin;

    #[test]
    fn record_round_trip() {
        let mut s = Session::new(builtin("holmes").unwrap()).unwrap();
        let q = s.game.scenario().ra.iter().next().unwrap().clone();
        s.game.ask(&q).unwrap();
        let json = serde_json::to_string(&s.record()).unwrap();
        let back = Session::from_record(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.game.state(), s.game.state());
        assert_eq!(back.id, s.id);
    }

    #[test]
    fn tampered_state_is_rejected() {
        let s = Session::new(builtin("holmes").unwrap()).unwrap();
        let mut record = s.record();
        record.state.entries.pop();
        assert!(matches!(
            Session::from_record(record),
            Err(SessionError::StateMismatch(_))
        ));
    }

    #[test]
    fn in_memory_store() {
        let store = SessionStore::in_memory();
        let s = store.create(builtin("mendel").unwrap()).unwrap();
        let id = s.lock().unwrap().id.clone();
        assert!(store.get(&id).is_some());
        assert_eq!(store.ids(), vec![id.clone()]);
        assert!(store.remove(&id).unwrap());
        assert!(!store.remove(&id).unwrap());
    }
}
