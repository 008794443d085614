//! Single-turn and multi-turn dialogue state, and the flat snapshot conditions read.

use serde::{Deserialize, Serialize};

use super::condition::StateSnapshot;
use crate::entity::EntityCandidate;
use crate::nlu::NluResult;
use crate::tree::{Cursor, NodeId, TaskTree};

/// Everything learned from the current utterance. Rebuilt every turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleTurnState {
    pub nlu: NluResult,
    pub candidates: Vec<EntityCandidate>,
    pub got_intent: bool,
    /// A candidate fits an open slot of the current leaf (any candidate when idle).
    pub got_entity_info: bool,
    pub got_intent_and_info: bool,
    pub faq_hit: bool,
    /// The intent names a task that is neither active nor paused.
    pub intent_is_new: bool,
}

/// Builds the single-turn flags. `slot_types` are the semantic types of the current leaf's
/// open slots, or `None` when no task is active.
pub fn update_single_turn_states(
    nlu: NluResult,
    candidates: Vec<EntityCandidate>,
    slot_types: Option<&[crate::config::SemanticType]>,
    tree: &TaskTree,
) -> SingleTurnState {
    let got_intent = nlu.intent.is_some();
    let got_entity_info = match slot_types {
        Some(types) => candidates.iter().any(|c| types.contains(&c.semantic_type)),
        None => !candidates.is_empty(),
    };
    let intent_is_new = nlu.intent.as_deref().is_some_and(|t| !tree.is_open(t));
    SingleTurnState {
        faq_hit: nlu.faq.is_some(),
        got_intent,
        got_entity_info,
        got_intent_and_info: got_intent && got_entity_info,
        intent_is_new,
        nlu,
        candidates,
    }
}

/// A question the bot is waiting on. At most one is outstanding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pending {
    Confirmation {
        task: String,
        leaf: NodeId,
        entity: String,
        value: String,
    },
    Disambiguation {
        task: String,
        leaf: NodeId,
        entity: String,
        options: Vec<EntityCandidate>,
    },
    RepeatOffer {
        task: String,
    },
}

/// State carried across turns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MultiTurnState {
    pub global_turn: u64,
    pub last_action: Option<String>,
    pub last_asked_entity: Option<Cursor>,
    pub pending: Option<Pending>,
    /// No task active at the end of the last turn.
    pub idle: bool,
}

impl MultiTurnState {
    pub fn new() -> Self {
        Self {
            idle: true,
            ..Self::default()
        }
    }

    pub fn expecting_yes_no(&self) -> bool {
        matches!(
            self.pending,
            Some(Pending::Confirmation { .. } | Pending::RepeatOffer { .. })
        )
    }

    pub fn pending_confirmation(&self) -> bool {
        matches!(self.pending, Some(Pending::Confirmation { .. }))
    }

    pub fn pending_disambiguation(&self) -> bool {
        matches!(self.pending, Some(Pending::Disambiguation { .. }))
    }

    pub fn pending_repeat_offer(&self) -> bool {
        matches!(self.pending, Some(Pending::RepeatOffer { .. }))
    }
}

/// Flattens the three state tiers into the paths the policy may test.
pub fn state_snapshot(
    single: &SingleTurnState,
    multi: &MultiTurnState,
    tree: &TaskTree,
    turn_limit_exceeded: bool,
) -> StateSnapshot {
    let mut s = StateSnapshot::default();
    s.set_bool("single.got_intent", single.got_intent);
    s.set_bool("single.got_entity_info", single.got_entity_info);
    s.set_bool("single.got_intent_and_info", single.got_intent_and_info);
    s.set_bool("single.faq_hit", single.faq_hit);
    s.set_bool("single.intent_is_new", single.intent_is_new);
    s.set_bool("single.is_greeting", single.nlu.is_greeting);
    s.set_bool("single.is_goodbye", single.nlu.is_goodbye);
    s.set_str("single.polarity", single.nlu.polarity.as_str());
    s.set_str("single.intent", single.nlu.intent.clone().unwrap_or_default());
    s.set_str(
        "single.suppressed_intent",
        single.nlu.suppressed_intent.clone().unwrap_or_default(),
    );
    s.set_int("single.candidate_count", single.candidates.len() as i64);

    s.set_int("multi.global_turn", multi.global_turn as i64);
    s.set_str("multi.last_action", multi.last_action.clone().unwrap_or_default());
    s.set_bool("multi.expecting_yes_no", multi.expecting_yes_no());
    s.set_bool("multi.idle", tree.active_task().is_none());
    s.set_bool("multi.pending_confirmation", multi.pending_confirmation());
    s.set_bool("multi.pending_disambiguation", multi.pending_disambiguation());
    s.set_bool("multi.pending_repeat_offer", multi.pending_repeat_offer());

    let active = tree.active_task();
    s.set_bool("tree.active", active.is_some());
    s.set_str("tree.active_task", active.unwrap_or_default());
    s.set_str(
        "tree.current_entity",
        tree.cursor().map(|c| c.entity.clone()).unwrap_or_default(),
    );
    s.set_int("tree.stack_depth", tree.stack().len() as i64);
    s.set_bool("tree.turn_limit_exceeded", turn_limit_exceeded);
    s.set_int("tree.task_turns", active.map(|t| tree.task_turns(t)).unwrap_or(0) as i64);
    s
}
