//! Entity extraction, slot resolution and the session entity history.

mod extract;
mod gazetteer;
mod history;
mod picklist;
mod resolve;

use serde::{Deserialize, Serialize};

use crate::config::SemanticType;

pub use extract::{extract_candidates, normalize};
pub use gazetteer::Gazetteer;
pub use history::{EntityHistory, EntityRecord};
pub use picklist::{fuzzy_match_picklist, picklist_matches, similarity, PICKLIST_THRESHOLD};
pub use resolve::{resolve_choice, resolve_slots, SlotRequest, SlotResolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMethod {
    Pattern,
    Gazetteer,
    FuzzyMatching,
    UserUtterance,
}

/// A typed span found in an utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityCandidate {
    pub semantic_type: SemanticType,
    /// Character offsets `[start, end)` into the utterance.
    pub span: (usize, usize),
    pub raw_text: String,
    pub normalized_value: String,
    pub method: ExtractionMethod,
    pub confidence: f64,
    /// For picklist matches, the entity whose option list produced it.
    pub entity_hint: Option<String>,
}
