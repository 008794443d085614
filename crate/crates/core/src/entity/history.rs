use serde::{Deserialize, Serialize};

use crate::config::SemanticType;

/// An entity value accepted during the session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub entity_name: String,
    pub semantic_type: Option<SemanticType>,
    pub value: String,
    pub turn_acquired: u64,
    pub source_task: String,
}

/// Session-long store of accepted entities, oldest first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityHistory {
    records: Vec<EntityRecord>,
}

impl EntityHistory {
    pub fn record(&mut self, record: EntityRecord) {
        self.records.push(record);
    }

    /// Most recent record for an entity name.
    pub fn lookup(&self, entity_name: &str) -> Option<&EntityRecord> {
        self.records.iter().rev().find(|r| r.entity_name == entity_name)
    }

    /// Most recent record of a type.
    pub fn lookup_type(&self, ty: SemanticType) -> Option<&EntityRecord> {
        self.records.iter().rev().find(|r| r.semantic_type == Some(ty))
    }

    /// Removes every record for `entity_name`; returns how many went.
    pub fn remove(&mut self, entity_name: &str) -> usize {
        let before = self.records.len();
        self.records.retain(|r| r.entity_name != entity_name);
        before - self.records.len()
    }

    pub fn records(&self) -> &[EntityRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
