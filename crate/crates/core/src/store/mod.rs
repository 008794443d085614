//! Session context persistence: an in-memory map for a single process, or an external
//! key-value server (RESP protocol) so several processes can share sessions.

mod kv;
mod resp;

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::DialogueContext;

pub use kv::{KvServer, KvStore};
pub use resp::{read_command, read_reply, write_command, write_reply, Reply};

pub const FORMAT_TAG: &str = "TODCTX";
pub const SCHEMA_VERSION: u32 = 1;
pub const KEY_PREFIX: &str = "converse:ctx:";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("session `{0}` not found")]
    NotFound(String),
    #[error("store unreachable: {0}")]
    Connection(String),
    #[error("context schema version {found} is not supported (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },
    #[error("corrupt context payload: {0}")]
    CorruptPayload(String),
    #[error("store protocol error: {0}")]
    Protocol(String),
    #[error("distributed mode needs an address")]
    MissingAddress,
}

pub fn key_for(session_id: &str) -> String {
    format!("{KEY_PREFIX}{session_id}")
}

/// `TODCTX/<version>\n<json>`. Deterministic for a given context.
pub fn serialize_context(ctx: &DialogueContext) -> Vec<u8> {
    let mut out = format!("{FORMAT_TAG}/{SCHEMA_VERSION}\n").into_bytes();
    out.extend(serde_json::to_vec(ctx).expect("context serializes"));
    out
}

pub fn deserialize_context(bytes: &[u8]) -> Result<DialogueContext, StoreError> {
    let nl = bytes
        .iter()
        .position(|b| *b == b'\n')
        .ok_or_else(|| StoreError::CorruptPayload("missing header".into()))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| StoreError::CorruptPayload("header is not UTF-8".into()))?;
    let version = header
        .strip_prefix(FORMAT_TAG)
        .and_then(|r| r.strip_prefix('/'))
        .ok_or_else(|| StoreError::CorruptPayload(format!("unknown format `{header}`")))?;
    if version != SCHEMA_VERSION.to_string() {
        return Err(StoreError::VersionMismatch {
            found: version.to_string(),
            expected: SCHEMA_VERSION,
        });
    }
    serde_json::from_slice(&bytes[nl + 1..]).map_err(|e| StoreError::CorruptPayload(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoreMode {
    /// In-process map.
    Standalone,
    /// External key-value server.
    Distributed,
}

impl FromStr for StoreMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "memory" | "standalone" => Ok(StoreMode::Standalone),
            "kv" | "distributed" => Ok(StoreMode::Distributed),
            other => Err(format!("unknown store mode `{other}` (memory or kv)")),
        }
    }
}

/// Load/save of session contexts. Implementations must be safe to share across threads.
pub trait ContextStore: Send + Sync {
    fn mode(&self) -> StoreMode;
    fn load(&self, session_id: &str) -> Result<DialogueContext, StoreError>;
    fn save(&self, ctx: &DialogueContext) -> Result<(), StoreError>;
    /// Removing an absent session is not an error.
    fn delete(&self, session_id: &str) -> Result<(), StoreError>;

    fn create(&self, ctx: &DialogueContext) -> Result<(), StoreError> {
        self.save(ctx)
    }

    fn exists(&self, session_id: &str) -> Result<bool, StoreError> {
        match self.load(session_id) {
            Ok(_) => Ok(true),
            Err(StoreError::NotFound(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// Keeps serialized envelopes so both stores go through the same encoding.
#[derive(Debug, Default)]
pub struct MemoryStore {
    map: Mutex<HashMap<String, Vec<u8>>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ContextStore for MemoryStore {
    fn mode(&self) -> StoreMode {
        StoreMode::Standalone
    }

    fn load(&self, session_id: &str) -> Result<DialogueContext, StoreError> {
        let map = self.map.lock().expect("store lock");
        let bytes = map
            .get(&key_for(session_id))
            .ok_or_else(|| StoreError::NotFound(session_id.to_string()))?;
        deserialize_context(bytes)
    }

    fn save(&self, ctx: &DialogueContext) -> Result<(), StoreError> {
        self.map
            .lock()
            .expect("store lock")
            .insert(key_for(&ctx.session_id), serialize_context(ctx));
        Ok(())
    }

    fn delete(&self, session_id: &str) -> Result<(), StoreError> {
        self.map.lock().expect("store lock").remove(&key_for(session_id));
        Ok(())
    }
}

/// Factory: standalone needs nothing, distributed needs a `host:port`.
pub fn make_store(mode: StoreMode, addr: Option<&str>) -> Result<Arc<dyn ContextStore>, StoreError> {
    match mode {
        StoreMode::Standalone => Ok(Arc::new(MemoryStore::new())),
        StoreMode::Distributed => {
            let addr = addr.ok_or(StoreError::MissingAddress)?;
            Ok(Arc::new(KvStore::connect(addr)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn ctx() -> DialogueContext {
        DialogueContext::new("s1", "v1", NaiveDate::from_ymd_opt(2024, 3, 14).unwrap())
    }

    #[test]
    fn envelope_round_trip() {
        let c = ctx();
        let bytes = serialize_context(&c);
        assert!(bytes.starts_with(b"TODCTX/1\n"));
        assert_eq!(deserialize_context(&bytes).unwrap(), c);
        assert_eq!(serialize_context(&deserialize_context(&bytes).unwrap()), bytes);
    }

    #[test]
    fn truncated_and_wrong_version() {
        let bytes = serialize_context(&ctx());
        assert!(matches!(
            deserialize_context(&bytes[..bytes.len() - 5]),
            Err(StoreError::CorruptPayload(_))
        ));
        let mut v2 = b"TODCTX/2\n".to_vec();
        v2.extend_from_slice(&bytes[9..]);
        assert!(matches!(deserialize_context(&v2), Err(StoreError::VersionMismatch { .. })));
    }

    #[test]
    fn memory_store_semantics() {
        let s = MemoryStore::new();
        assert!(matches!(s.load("s1"), Err(StoreError::NotFound(_))));
        let c = ctx();
        s.save(&c).unwrap();
        assert_eq!(s.load("s1").unwrap(), c);
        s.delete("s1").unwrap();
        s.delete("s1").unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn distributed_without_address() {
        assert!(matches!(make_store(StoreMode::Distributed, None), Err(StoreError::MissingAddress)));
    }
}
