use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::actions::{ActionCx, ActionEffect, SharedAction, BUILTIN_ACTIONS};
use super::nlg::render_response;
use super::state::{state_snapshot, update_single_turn_states};
use super::DialogueError;
use crate::backend::BackendRegistry;
use crate::config::{validate_config_with_actions, BotConfig, EntityDef, SemanticType, ValidationReport};
use crate::context::DialogueContext;
use crate::entity::extract_candidates;
use crate::nlu::{Nlu, NluResult};
use crate::tree::TurnLimit;

/// Result of one user turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnOutcome {
    pub reply: String,
    /// Turns processed in the session, this one included.
    pub turn: u64,
    /// Action chosen by the policy.
    pub action: String,
    pub effect: ActionEffect,
    pub active_task: Option<String>,
    pub nlu: NluResult,
    /// True when the turn failed internally and only the apology was sent.
    pub degraded: bool,
}

/// The orchestrator: one per bot, shared by all sessions.
#[derive(Clone)]
pub struct Engine {
    config: Arc<BotConfig>,
    nlu: Nlu,
    backends: Arc<BackendRegistry>,
    custom: HashMap<String, SharedAction>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("bot", &self.config.bot_meta.bot_name)
            .field("version", &self.config.version)
            .field("custom_actions", &self.custom.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Engine {
    pub fn new(config: Arc<BotConfig>, backends: Arc<BackendRegistry>) -> Self {
        let nlu = Nlu::new(config.clone());
        Self::with_nlu(config, backends, nlu)
    }

    /// Uses a caller-built NLU front end (for example one with a different intent matcher).
    pub fn with_nlu(config: Arc<BotConfig>, backends: Arc<BackendRegistry>, nlu: Nlu) -> Self {
        Self {
            config,
            nlu,
            backends,
            custom: HashMap::new(),
        }
    }

    pub fn register_action(&mut self, name: &str, action: SharedAction) -> Result<(), DialogueError> {
        if BUILTIN_ACTIONS.contains(&name) || self.custom.contains_key(name) {
            return Err(DialogueError::DuplicateAction(name.to_string()));
        }
        self.custom.insert(name.to_string(), action);
        Ok(())
    }

    pub fn config(&self) -> &Arc<BotConfig> {
        &self.config
    }

    pub fn nlu(&self) -> &Nlu {
        &self.nlu
    }

    pub fn backends(&self) -> &BackendRegistry {
        &self.backends
    }

    /// Validates the config against built-in and registered actions.
    pub fn validate(&self) -> ValidationReport {
        let mut names: Vec<&str> = BUILTIN_ACTIONS.to_vec();
        names.extend(self.custom.keys().map(String::as_str));
        validate_config_with_actions(&self.config, &names)
    }

    pub fn new_context(&self, session_id: impl Into<String>, today: NaiveDate) -> DialogueContext {
        DialogueContext::new(session_id, self.config.version.clone(), today)
    }

    pub fn fresh_context(&self) -> DialogueContext {
        DialogueContext::fresh(self.config.version.clone())
    }

    pub fn check_context(&self, ctx: &DialogueContext) -> Result<(), DialogueError> {
        if ctx.config_version != self.config.version {
            return Err(DialogueError::ConfigMismatch {
                expected: self.config.version.clone(),
                found: ctx.config_version.clone(),
            });
        }
        Ok(())
    }

    /// The opening line of a session.
    pub fn greeting(&self) -> String {
        let events = [super::ResponseEvent::template("greeting", &[("bot_name", &self.config.bot_meta.bot_name)])];
        render_response(&events, &self.config.templates, 0).unwrap_or_else(|e| {
            log::error!("greeting template: {e}");
            String::new()
        })
    }

    fn fixed(&self, name: &str, seed: u64) -> String {
        render_response(&[super::ResponseEvent::template(name, &[])], &self.config.templates, seed)
            .unwrap_or_else(|_| "Sorry, something went wrong on my side.".to_string())
    }

    /// Runs one turn on a copy of `ctx`. The copy is returned with every effect applied;
    /// if anything fails midway the original is returned with only the turn counter
    /// advanced, along with the apology.
    pub fn process_turn(&self, ctx: &DialogueContext, utterance: &str) -> (TurnOutcome, DialogueContext) {
        let mut work = ctx.clone();
        let nlu = self.nlu.analyze(utterance);
        match self.run(&mut work, utterance, nlu.clone()) {
            Ok(mut outcome) => {
                work.multi_turn.global_turn += 1;
                work.multi_turn.last_action = Some(outcome.action.clone());
                work.multi_turn.idle = work.tree.active_task().is_none();
                outcome.turn = work.multi_turn.global_turn;
                outcome.active_task = work.tree.active_task().map(str::to_string);
                if outcome.reply.is_empty() {
                    outcome.reply = self.fixed("fallback", outcome.turn);
                }
                (outcome, work)
            }
            Err(e) => {
                log::error!("turn failed in session {}: {e}", ctx.session_id);
                let mut kept = ctx.clone();
                kept.multi_turn.global_turn += 1;
                let outcome = TurnOutcome {
                    reply: self.fixed("apology", kept.multi_turn.global_turn),
                    turn: kept.multi_turn.global_turn,
                    action: "apology".into(),
                    effect: ActionEffect::default(),
                    active_task: kept.tree.active_task().map(str::to_string),
                    nlu,
                    degraded: true,
                };
                (outcome, kept)
            }
        }
    }

    /// [`Self::process_turn`] that writes the result back into `ctx`.
    pub fn process_turn_in_place(&self, ctx: &mut DialogueContext, utterance: &str) -> TurnOutcome {
        let (outcome, next) = self.process_turn(ctx, utterance);
        *ctx = next;
        outcome
    }

    fn run(&self, work: &mut DialogueContext, utterance: &str, nlu: NluResult) -> Result<TurnOutcome, DialogueError> {
        let config = &*self.config;

        // Types the current leaf is waiting for.
        let leaf_entities: Option<Vec<&EntityDef>> = work.tree.cursor().map(|c| {
            work.tree
                .leaf(c.leaf)
                .map(|l| {
                    l.slots
                        .iter()
                        .filter(|s| s.status.is_open())
                        .filter_map(|s| config.entity(&s.entity_name))
                        .collect()
                })
                .unwrap_or_default()
        });
        let slot_types: Option<Vec<SemanticType>> =
            leaf_entities.as_ref().map(|defs| defs.iter().filter_map(|d| d.semantic_type).collect());

        let all_defs: Vec<&EntityDef> = config.entities.values().collect();
        let (expected, defs): (BTreeSet<SemanticType>, Vec<&EntityDef>) = match (&leaf_entities, &slot_types) {
            (Some(leaf_defs), Some(types)) if nlu.intent.is_none() => {
                (types.iter().copied().collect(), leaf_defs.clone())
            }
            _ => {
                let mut set: BTreeSet<SemanticType> =
                    SemanticType::ALL.into_iter().filter(|t| *t != SemanticType::UserUtt).collect();
                set.extend(slot_types.iter().flatten().copied());
                (set, all_defs)
            }
        };
        let candidates = extract_candidates(utterance, &expected, &defs, work.clock_origin);
        let single = update_single_turn_states(nlu, candidates, slot_types.as_deref(), &work.tree);

        let exceeded = match work.tree.active_task().map(str::to_string) {
            Some(task) => work.tree.tick_and_check_turn_limit(&task) == TurnLimit::Exceeded,
            None => false,
        };

        let snapshot = state_snapshot(&single, &work.multi_turn, &work.tree, exceeded);
        let action = config.policy.select_action(&snapshot)?.to_string();
        log::debug!("session {} turn {}: action {action}", work.session_id, work.multi_turn.global_turn + 1);

        let seed = work.multi_turn.global_turn;
        let mut cx = ActionCx::new(config, &self.backends, work, &single, utterance);
        cx.effect.actions.push(action.clone());
        if !cx.run_builtin(&action)? {
            let custom = self
                .custom
                .get(&action)
                .ok_or_else(|| DialogueError::UnknownAction(action.clone()))?;
            custom.execute(&mut cx)?;
        }
        let effect = std::mem::take(&mut cx.effect);
        drop(cx);

        let reply = render_response(&effect.events, &config.templates, seed)?;
        Ok(TurnOutcome {
            reply,
            turn: 0,
            action,
            effect,
            active_task: None,
            nlu: single.nlu.clone(),
            degraded: false,
        })
    }
}
