//! Per-session dialogue context: everything a turn needs besides the shared bot config.

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::dialogue::MultiTurnState;
use crate::entity::EntityHistory;
use crate::tree::TaskTree;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueContext {
    pub session_id: String,
    pub created_at: DateTime<Utc>,
    /// "today" for relative dates. Fixed for the life of the session.
    pub clock_origin: NaiveDate,
    pub tree: TaskTree,
    pub multi_turn: MultiTurnState,
    pub entity_history: EntityHistory,
    /// Digest of the bot config the session was started with.
    pub config_version: String,
}

impl DialogueContext {
    pub fn new(session_id: impl Into<String>, config_version: impl Into<String>, clock_origin: NaiveDate) -> Self {
        Self {
            session_id: session_id.into(),
            created_at: Utc::now(),
            clock_origin,
            tree: TaskTree::new(),
            multi_turn: MultiTurnState::new(),
            entity_history: EntityHistory::default(),
            config_version: config_version.into(),
        }
    }

    /// A context with a random id and today's date.
    pub fn fresh(config_version: impl Into<String>) -> Self {
        Self::new(uuid::Uuid::new_v4().to_string(), config_version, Utc::now().date_naive())
    }
}
