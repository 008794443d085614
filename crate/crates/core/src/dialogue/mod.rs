//! Dialogue management: state tracking, the Policy Decision Tree, the shared action
//! library, template NLG and the per-turn orchestrator.

pub mod actions;
pub mod condition;
mod engine;
pub mod nlg;
pub mod policy;
mod state;

use thiserror::Error;

use crate::backend::BackendError;
use crate::tree::TreeError;

pub use actions::{ActionCx, ActionEffect, BackendCall, DialogueAction, PromptRecord, SharedAction, TreeOp, BUILTIN_ACTIONS};
pub use condition::{
    evaluate_condition, parse_condition_expr, CompareOp, ConditionError, ConditionExpr, StateSnapshot, StateValue, ValueType,
    STATE_SCHEMA,
};
pub use engine::{Engine, TurnOutcome};
pub use nlg::{join_options, render_response, NlgError, ResponseEvent, INFO_TOKEN};
pub use policy::{PolicyDefError, PolicyError, PolicyNode, PolicyTreeDef};
pub use state::{state_snapshot, update_single_turn_states, MultiTurnState, Pending, SingleTurnState};

#[derive(Debug, Error)]
pub enum DialogueError {
    #[error("action `{0}` is not registered")]
    UnknownAction(String),
    #[error("action `{0}` is already registered")]
    DuplicateAction(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Nlg(#[from] NlgError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("session config {found} does not match the engine's {expected}")]
    ConfigMismatch { expected: String, found: String },
}
