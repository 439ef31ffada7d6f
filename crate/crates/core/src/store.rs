//! Key-value persistence of conversation states.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{ConversationState, StateError};

pub const FORMAT_NAME: &str = "taskbot-conversation-state";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid session id {0:?}")]
    InvalidSessionId(String),
    #[error("state belongs to session {found:?}, not {expected:?}")]
    SessionMismatch { expected: String, found: String },
    #[error("state violates an invariant: {0}")]
    Invalid(#[from] StateError),
    #[error("could not serialize state: {0}")]
    Serialize(#[source] serde_json::Error),
    #[error("stored state for {session_id:?} is corrupt: {source}")]
    Decode {
        session_id: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("stored state for {session_id:?} has format {format:?} version {version}")]
    UnsupportedFormat { session_id: String, format: String, version: u32 },
    #[error("storage backend unavailable at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("storage backend unavailable: {0}")]
    Unavailable(String),
}

/// session id -> serialized state. A missing session is `Ok(None)`.
pub trait StateStore: Send + Sync {
    fn put_state(&self, session_id: &str, state: &ConversationState) -> Result<(), StoreError>;
    fn get_state(&self, session_id: &str) -> Result<Option<ConversationState>, StoreError>;
}

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    format: &'a str,
    version: u32,
    state: &'a ConversationState,
}

#[derive(Deserialize)]
struct EnvelopeIn {
    format: String,
    version: u32,
    state: serde_json::Value,
}

/// Ids become file names, so anything that could escape the root or hide
/// the file is refused.
pub fn check_session_id(session_id: &str) -> Result<(), StoreError> {
    let ok = !session_id.is_empty()
        && session_id.len() <= 128
        && !session_id.starts_with('.')
        && session_id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidSessionId(session_id.to_string()))
    }
}

fn encode(session_id: &str, state: &ConversationState) -> Result<String, StoreError> {
    check_session_id(session_id)?;
    if state.session_id != session_id {
        return Err(StoreError::SessionMismatch { expected: session_id.to_string(), found: state.session_id.clone() });
    }
    state.validate()?;
    let envelope = EnvelopeOut { format: FORMAT_NAME, version: FORMAT_VERSION, state };
    serde_json::to_string_pretty(&envelope).map_err(StoreError::Serialize)
}

fn decode(session_id: &str, text: &str) -> Result<ConversationState, StoreError> {
    let decode_err = |source| StoreError::Decode { session_id: session_id.to_string(), source };
    let envelope: EnvelopeIn = serde_json::from_str(text).map_err(decode_err)?;
    if envelope.format != FORMAT_NAME || envelope.version != FORMAT_VERSION {
        return Err(StoreError::UnsupportedFormat {
            session_id: session_id.to_string(),
            format: envelope.format,
            version: envelope.version,
        });
    }
    serde_json::from_value(envelope.state).map_err(decode_err)
}

/// Process-local store. Values are kept serialized so that reads go through
/// the same decode path as the file store.
#[derive(Debug, Default)]
pub struct MemoryStore {
    entries: Mutex<HashMap<String, String>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.lock().keys().cloned().collect();
        ids.sort();
        ids
    }

    /// Overwrite the raw payload, bypassing encoding. Used to simulate
    /// corruption.
    pub fn put_raw(&self, session_id: &str, payload: &str) {
        self.lock().insert(session_id.to_string(), payload.to_string());
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<String, String>> {
        self.entries.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}

impl StateStore for MemoryStore {
    fn put_state(&self, session_id: &str, state: &ConversationState) -> Result<(), StoreError> {
        let payload = encode(session_id, state)?;
        self.lock().insert(session_id.to_string(), payload);
        Ok(())
    }

    fn get_state(&self, session_id: &str) -> Result<Option<ConversationState>, StoreError> {
        check_session_id(session_id)?;
        let payload = self.lock().get(session_id).cloned();
        payload.map(|p| decode(session_id, &p)).transpose()
    }
}

/// One `<session_id>.state` file per session under `root`. Writes go to a
/// temporary file first and are renamed into place, so a reader never sees
/// half a document.
#[derive(Debug)]
pub struct FileStore {
    root: PathBuf,
}

impl FileStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|source| StoreError::Io { path: root.clone(), source })?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, session_id: &str) -> Result<PathBuf, StoreError> {
        check_session_id(session_id)?;
        Ok(self.root.join(format!("{session_id}.state")))
    }
}

impl StateStore for FileStore {
    fn put_state(&self, session_id: &str, state: &ConversationState) -> Result<(), StoreError> {
        let payload = encode(session_id, state)?;
        let path = self.path_for(session_id)?;
        let tmp = self.root.join(format!(".{session_id}.state.tmp"));
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| StoreError::Io { path, source }
        };
        fs::write(&tmp, payload).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }

    fn get_state(&self, session_id: &str) -> Result<Option<ConversationState>, StoreError> {
        let path = self.path_for(session_id)?;
        match fs::read_to_string(&path) {
            Ok(text) => decode(session_id, &text).map(Some),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(source) => Err(StoreError::Io { path, source }),
        }
    }
}
