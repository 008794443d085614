//! The dialogue-action library shared by every task, and the context actions run in.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::nlg::{join_options, ResponseEvent};
use super::state::{Pending, SingleTurnState};
use super::DialogueError;
use crate::backend::{BackendError, BackendRegistry, BackendRequest, BackendResult};
use crate::config::{entity_label, BotConfig, EntitySlotSpec, GroupOperator, SemanticType};
use crate::context::DialogueContext;
use crate::entity::{resolve_choice, resolve_slots, EntityCandidate, EntityRecord, SlotRequest, SlotResolution};
use crate::tree::{NodeId, PopResult, SlotOutcome, SlotStatus, Traversal, TreeError};

/// Names the default policy may use without registering anything.
pub const BUILTIN_ACTIONS: &[&str] = &[
    "greeting",
    "new_task",
    "new_task_with_info",
    "continue_task",
    "confirm_entity",
    "handle_yes",
    "handle_no",
    "disambiguate",
    "answer_faq",
    "finish_task",
    "fail_task",
    "quit_task_turn_limit",
    "switch_task",
    "fallback_clarify",
    "goodbye",
];

/// A custom action. Registered on the engine under a name the policy tree can use.
pub trait DialogueAction: Send + Sync {
    fn execute(&self, cx: &mut ActionCx<'_>) -> Result<(), DialogueError>;
}

impl<F> DialogueAction for F
where
    F: Fn(&mut ActionCx<'_>) -> Result<(), DialogueError> + Send + Sync,
{
    fn execute(&self, cx: &mut ActionCx<'_>) -> Result<(), DialogueError> {
        self(cx)
    }
}

pub type SharedAction = Arc<dyn DialogueAction>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "arg", rename_all = "snake_case")]
pub enum TreeOp {
    AddTask(String),
    EnterSubtask(String),
    SlotFilled { task: String, entity: String, value: String },
    SlotFailed { task: String, entity: String },
    FinishTask(String),
    FailTask(String),
    QuitTask(String),
    ResetTask(String),
    Resume(String),
    Idle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendCall {
    pub function: String,
    pub entity: String,
    pub value: String,
    pub success: bool,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub task: String,
    pub entity: String,
}

/// What a turn did: tree operations, backend calls and response events, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionEffect {
    /// The selected action followed by any chained ones (finish_task, fail_task).
    pub actions: Vec<String>,
    pub tree_ops: Vec<TreeOp>,
    pub backend_calls: Vec<BackendCall>,
    pub events: Vec<ResponseEvent>,
    pub prompted: Vec<PromptRecord>,
    pub finished_tasks: Vec<String>,
    pub failed_tasks: Vec<String>,
}

/// Mutable view of one turn handed to actions. Changes land in a scratch copy of the
/// context that the engine commits only if the whole turn succeeds.
pub struct ActionCx<'a> {
    pub config: &'a BotConfig,
    pub backends: &'a BackendRegistry,
    pub ctx: &'a mut DialogueContext,
    pub single: &'a SingleTurnState,
    pub utterance: &'a str,
    /// The question left open by the previous turn. Dropped unless an action re-asks it.
    pub incoming: Option<Pending>,
    pub effect: ActionEffect,
    leftovers: Vec<EntityCandidate>,
}

enum Step {
    Progress,
    Asked,
    Nothing,
}

impl<'a> ActionCx<'a> {
    pub fn new(
        config: &'a BotConfig,
        backends: &'a BackendRegistry,
        ctx: &'a mut DialogueContext,
        single: &'a SingleTurnState,
        utterance: &'a str,
    ) -> Self {
        let incoming = ctx.multi_turn.pending.take();
        Self {
            config,
            backends,
            ctx,
            single,
            utterance,
            incoming,
            effect: ActionEffect::default(),
            leftovers: single.candidates.clone(),
        }
    }

    // -- output helpers ----------------------------------------------------

    pub fn say(&mut self, event: ResponseEvent) {
        self.effect.events.push(event);
    }

    pub fn say_template(&mut self, name: &str, bindings: &[(&str, &str)]) {
        self.say(ResponseEvent::template(name, bindings));
    }

    pub fn say_text(&mut self, variants: &[String], info: Option<String>) {
        if !variants.is_empty() {
            self.say(ResponseEvent::text(variants.to_vec(), info));
        }
    }

    fn description(&self, task: &str) -> String {
        self.config
            .task(task)
            .map(|t| t.description.clone())
            .unwrap_or_else(|| entity_label(task))
    }

    fn spec(&self, task: &str, entity: &str) -> Option<&'a EntitySlotSpec> {
        self.config.task(task).and_then(|t| t.entity_specs.get(entity))
    }

    fn entity_type(&self, entity: &str) -> Option<SemanticType> {
        self.config.entity(entity).and_then(|d| d.semantic_type)
    }

    fn announce(&mut self, task: &str) {
        let d = self.description(task);
        self.say_template("task_start", &[("task", &d)]);
    }

    fn announce_subtask(&mut self, task: &str) {
        let d = self.description(task);
        self.say_template("subtask_start", &[("task", &d)]);
    }

    /// Asks for the cursor's entity and remembers that it was asked.
    pub fn prompt_current(&mut self) -> Result<(), DialogueError> {
        let Some(cur) = self.ctx.tree.cursor().cloned() else {
            return Ok(());
        };
        match self.spec(&cur.task, &cur.entity).filter(|s| !s.prompt.is_empty()) {
            Some(spec) => self.say_text(&spec.prompt, None),
            None => {
                let label = entity_label(&cur.entity);
                self.say_template("ask_entity", &[("entity", &label)]);
            }
        }
        self.ctx.tree.mark_slot(cur.leaf, &cur.entity, SlotStatus::Asked)?;
        self.effect.prompted.push(PromptRecord {
            task: cur.task.clone(),
            entity: cur.entity.clone(),
        });
        self.ctx.multi_turn.last_asked_entity = Some(cur);
        Ok(())
    }

    /// Re-asks an open question and keeps it open.
    pub fn ask_pending(&mut self, pending: Pending) {
        match &pending {
            Pending::Confirmation { entity, value, .. } => {
                let label = entity_label(entity);
                self.say_template("confirm_entity", &[("entity", &label), ("value", value)]);
            }
            Pending::Disambiguation { entity, options, .. } => {
                let label = entity_label(entity);
                let values: Vec<&str> = options.iter().map(|c| c.normalized_value.as_str()).collect();
                let joined = join_options(&values);
                self.say_template("disambiguate", &[("entity", &label), ("options", &joined)]);
            }
            Pending::RepeatOffer { task } => {
                let variants = self.config.task(task).map(|t| t.repeat_response.clone()).unwrap_or_default();
                if variants.is_empty() {
                    let d = self.description(task);
                    self.say_template("repeat_offer", &[("task", &d)]);
                } else {
                    self.say_text(&variants, None);
                }
            }
        }
        self.ctx.multi_turn.pending = Some(pending);
    }

    /// Puts the conversation back on track: the open question, else the current prompt,
    /// else an offer of further help.
    pub fn follow_up(&mut self) -> Result<(), DialogueError> {
        if let Some(p) = self.incoming.take() {
            self.ask_pending(p);
        } else if self.ctx.tree.cursor().is_some() {
            self.prompt_current()?;
        } else {
            self.say_template("anything_else", &[]);
        }
        Ok(())
    }

    // -- backend -----------------------------------------------------------

    fn call_backend(&mut self, function: &str, task: &str, entity: &str, value: &str) -> BackendResult {
        let req = BackendRequest {
            function_ref: function.to_string(),
            entity_name: entity.to_string(),
            value: value.to_string(),
            session_id: self.ctx.session_id.clone(),
            task_name: task.to_string(),
            collected: self.ctx.tree.collected(task),
        };
        let result = match self.backends.dispatch(&req) {
            Ok(r) => r,
            Err(e @ BackendError::UnknownHandler(_)) | Err(e @ BackendError::DuplicateHandler(_)) => {
                log::error!("{e}");
                BackendResult::fail()
            }
        };
        self.effect.backend_calls.push(BackendCall {
            function: function.to_string(),
            entity: entity.to_string(),
            value: value.to_string(),
            success: result.success,
            message: result.message.clone(),
        });
        result
    }

    /// Runs an entity value through its backend and records the outcome on the leaf.
    fn accept(&mut self, task: &str, leaf: NodeId, entity: &str, value: &str) -> Result<bool, DialogueError> {
        let op = self
            .ctx
            .tree
            .leaf(leaf)
            .map(|l| l.operator)
            .ok_or(TreeError::NotALeaf(leaf))?;
        let spec = self.spec(task, entity);
        let result = match spec.and_then(|s| s.function.clone()) {
            Some(f) => self.call_backend(&f, task, entity, value),
            None => BackendResult::ok(),
        };
        let response = spec.map(|s| s.response.clone()).unwrap_or_default();
        if result.success {
            let stored = result.normalized_echo.clone().unwrap_or_else(|| value.to_string());
            self.ctx.tree.force_slot(leaf, entity, SlotOutcome::Ok(stored.clone()))?;
            self.ctx.entity_history.record(EntityRecord {
                entity_name: entity.to_string(),
                semantic_type: self.entity_type(entity),
                value: stored.clone(),
                turn_acquired: self.ctx.multi_turn.global_turn + 1,
                source_task: task.to_string(),
            });
            self.effect.tree_ops.push(TreeOp::SlotFilled {
                task: task.to_string(),
                entity: entity.to_string(),
                value: stored,
            });
            self.say_text(&response, result.message);
            return Ok(true);
        }
        self.ctx.tree.force_slot(leaf, entity, SlotOutcome::Failed)?;
        self.effect.tree_ops.push(TreeOp::SlotFailed {
            task: task.to_string(),
            entity: entity.to_string(),
        });
        match op {
            GroupOperator::Verify => {
                let label = entity_label(entity);
                self.say_template("verify_failed", &[("entity", &label)]);
            }
            // A false answer picks the other branch; it is not an error.
            GroupOperator::Api => self.say_text(&response, result.message),
            GroupOperator::Insert | GroupOperator::Inform => self.say_template("apology", &[]),
        }
        Ok(false)
    }

    /// Either asks for confirmation or accepts right away, per the slot spec.
    fn take_value(&mut self, task: &str, leaf: NodeId, entity: &str, value: &str) -> Result<Step, DialogueError> {
        if self.spec(task, entity).is_some_and(|s| s.confirm) {
            self.ctx.tree.mark_slot(leaf, entity, SlotStatus::Confirming)?;
            self.ask_pending(Pending::Confirmation {
                task: task.to_string(),
                leaf,
                entity: entity.to_string(),
                value: value.to_string(),
            });
            return Ok(Step::Asked);
        }
        self.accept(task, leaf, entity, value)?;
        Ok(Step::Progress)
    }

    /// Fits this turn's unused candidates onto the open slots of the current leaf.
    fn apply_candidates(&mut self) -> Result<Step, DialogueError> {
        let Some(cur) = self.ctx.tree.cursor().cloned() else {
            return Ok(Step::Nothing);
        };
        let requests: Vec<SlotRequest> = self
            .ctx
            .tree
            .leaf(cur.leaf)
            .map(|l| {
                l.slots
                    .iter()
                    .filter(|s| s.status.is_open())
                    .filter_map(|s| {
                        self.entity_type(&s.entity_name).map(|t| SlotRequest {
                            entity_name: s.entity_name.clone(),
                            semantic_type: t,
                        })
                    })
                    .collect()
            })
            .unwrap_or_default();
        if requests.is_empty() || self.leftovers.is_empty() {
            return Ok(Step::Nothing);
        }
        let mut pool = std::mem::take(&mut self.leftovers);
        let resolutions = resolve_slots(&mut pool, &requests);
        self.leftovers = pool;
        let mut step = Step::Nothing;
        for r in resolutions {
            match r {
                SlotResolution::Assigned(entity, c) => {
                    if let Step::Asked = self.take_value(&cur.task, cur.leaf, &entity, &c.normalized_value)? {
                        return Ok(Step::Asked);
                    }
                    step = Step::Progress;
                }
                SlotResolution::Ambiguous(entity, options) => {
                    self.ask_pending(Pending::Disambiguation {
                        task: cur.task.clone(),
                        leaf: cur.leaf,
                        entity,
                        options,
                    });
                    return Ok(Step::Asked);
                }
                SlotResolution::NoMatch(_) => {}
            }
        }
        Ok(step)
    }

    // -- traversal ---------------------------------------------------------

    /// Follows the tree from a traversal result until the bot has something to ask:
    /// announces sub-tasks, runs INFORM leaves, pre-fills from history, uses leftover
    /// candidates, finishes or fails tasks and resumes paused ones.
    pub fn advance(&mut self, mut trav: Traversal) -> Result<(), DialogueError> {
        loop {
            match trav {
                Traversal::Leaf { cursor, entered } => {
                    for t in &entered {
                        self.effect.tree_ops.push(TreeOp::EnterSubtask(t.clone()));
                        self.announce_subtask(t);
                    }
                    let op = self.ctx.tree.leaf(cursor.leaf).map(|l| l.operator);
                    if op == Some(GroupOperator::Inform) {
                        let open: Vec<String> = self
                            .ctx
                            .tree
                            .leaf(cursor.leaf)
                            .map(|l| l.slots.iter().filter(|s| s.status.is_open()).map(|s| s.entity_name.clone()).collect())
                            .unwrap_or_default();
                        for e in open {
                            self.accept(&cursor.task, cursor.leaf, &e, "")?;
                        }
                        trav = self.ctx.tree.traverse_next_leaf(self.config)?;
                        continue;
                    }
                    let remembered = self
                        .ctx
                        .entity_history
                        .lookup(&cursor.entity)
                        .filter(|r| r.source_task != cursor.task)
                        .map(|r| r.value.clone());
                    if let Some(value) = remembered {
                        if let Step::Asked = self.take_value(&cursor.task, cursor.leaf, &cursor.entity, &value)? {
                            return Ok(());
                        }
                        trav = self.ctx.tree.traverse_next_leaf(self.config)?;
                        continue;
                    }
                    match self.apply_candidates()? {
                        Step::Asked => return Ok(()),
                        Step::Progress => {
                            trav = self.ctx.tree.traverse_next_leaf(self.config)?;
                            continue;
                        }
                        Step::Nothing => {}
                    }
                    return self.prompt_current();
                }
                Traversal::TaskComplete(t) => match self.finish_task(&t)? {
                    Some(next) => trav = next,
                    None => return Ok(()),
                },
                Traversal::TaskFailed(t) => match self.fail_task(&t, false)? {
                    Some(next) => trav = next,
                    None => return Ok(()),
                },
            }
        }
    }

    fn pop(&mut self) -> Result<Option<Traversal>, DialogueError> {
        match self.ctx.tree.finish_or_pop(self.config)? {
            PopResult::Resumed(t) => {
                if let Some(a) = self.ctx.tree.active_task() {
                    self.effect.tree_ops.push(TreeOp::Resume(a.to_string()));
                }
                Ok(Some(t))
            }
            PopResult::Idle => {
                self.effect.tree_ops.push(TreeOp::Idle);
                Ok(None)
            }
        }
    }

    fn finish_task(&mut self, task: &str) -> Result<Option<Traversal>, DialogueError> {
        self.effect.actions.push("finish_task".into());
        self.effect.tree_ops.push(TreeOp::FinishTask(task.to_string()));
        self.effect.finished_tasks.push(task.to_string());
        let def = self.config.task(task).ok_or_else(|| TreeError::UnknownTask(task.to_string()))?;
        let info = match &def.task_finish_function {
            Some(f) => self.call_backend(f, task, "", "").message,
            None => None,
        };
        if def.finish_response.success.is_empty() {
            self.say_template("task_done", &[]);
        } else {
            self.say_text(&def.finish_response.success, info);
        }
        let next = self.pop()?;
        if next.is_none() {
            if def.repeat {
                self.ask_pending(Pending::RepeatOffer { task: task.to_string() });
            } else {
                self.say_template("anything_else", &[]);
            }
        }
        Ok(next)
    }

    fn fail_task(&mut self, task: &str, turn_limit: bool) -> Result<Option<Traversal>, DialogueError> {
        self.effect.actions.push("fail_task".into());
        self.effect.tree_ops.push(TreeOp::FailTask(task.to_string()));
        self.effect.failed_tasks.push(task.to_string());
        let failure = self
            .config
            .task(task)
            .map(|t| t.finish_response.failure.clone())
            .unwrap_or_default();
        if failure.is_empty() {
            let d = self.description(task);
            self.say_template("task_failed", &[("task", &d)]);
        } else {
            self.say_text(&failure, None);
        }
        if turn_limit && self.config.templates.contains("turn_limit_handoff") {
            self.say_template("turn_limit_handoff", &[]);
        }
        let next = self.pop()?;
        if next.is_none() {
            self.say_template("anything_else", &[]);
        }
        Ok(next)
    }

    /// Starts the intent's task, or re-announces it when it is already under way.
    fn start_intent(&mut self) -> Result<(), DialogueError> {
        let Some(intent) = self.single.nlu.intent.clone() else {
            return self.fallback_clarify();
        };
        if self.ctx.tree.is_open(&intent) {
            let chain: Vec<String> = self.ctx.tree.subtask_chain().iter().map(|s| s.to_string()).collect();
            if let Some((owner, subs)) = chain.split_first() {
                self.announce(owner);
                for s in subs {
                    self.announce_subtask(s);
                }
            }
            self.incoming = None;
            return self.prompt_current();
        }
        match self.ctx.tree.add_task(self.config, &intent) {
            Ok(trav) => {
                self.effect.tree_ops.push(TreeOp::AddTask(intent.clone()));
                self.announce(&intent);
                self.advance(trav)
            }
            Err(TreeError::TaskAlreadyComplete(_)) => {
                let d = self.description(&intent);
                self.say_template("already_done", &[("task", &d)]);
                self.follow_up()
            }
            Err(e) => Err(e.into()),
        }
    }

    // -- built-in actions --------------------------------------------------

    pub fn greeting(&mut self) -> Result<(), DialogueError> {
        let name = self.config.bot_meta.bot_name.clone();
        self.say_template("greeting", &[("bot_name", &name)]);
        if self.ctx.tree.active_task().is_some() || self.incoming.is_some() {
            self.follow_up()?;
        }
        Ok(())
    }

    pub fn new_task(&mut self) -> Result<(), DialogueError> {
        self.start_intent()
    }

    pub fn switch_task(&mut self) -> Result<(), DialogueError> {
        self.start_intent()
    }

    pub fn continue_task(&mut self) -> Result<(), DialogueError> {
        let Some(cur) = self.ctx.tree.cursor().cloned() else {
            return self.fallback_clarify();
        };
        if let Some(Pending::Disambiguation { leaf, entity, options, task }) = self.incoming.take() {
            if leaf == cur.leaf {
                let values: Vec<String> = options.iter().map(|c| c.normalized_value.clone()).collect();
                if let Some(i) = resolve_choice(self.utterance, &values) {
                    if let Step::Asked = self.take_value(&task, leaf, &entity, &values[i])? {
                        return Ok(());
                    }
                    let trav = self.ctx.tree.traverse_next_leaf(self.config)?;
                    return self.advance(trav);
                }
            }
        }
        match self.apply_candidates()? {
            Step::Asked => return Ok(()),
            Step::Progress => {}
            Step::Nothing => {
                let op = self.ctx.tree.leaf(cur.leaf).map(|l| l.operator);
                self.ctx.tree.force_slot(cur.leaf, &cur.entity, SlotOutcome::Failed)?;
                self.effect.tree_ops.push(TreeOp::SlotFailed {
                    task: cur.task.clone(),
                    entity: cur.entity.clone(),
                });
                let label = entity_label(&cur.entity);
                if op == Some(GroupOperator::Verify) {
                    self.say_template("verify_failed", &[("entity", &label)]);
                } else {
                    self.say_template("not_understood", &[("entity", &label)]);
                    let suggest = self
                        .config
                        .entity(&cur.entity)
                        .filter(|d| d.suggest_value)
                        .and_then(|d| d.methods.fuzzy_matching.clone());
                    if let Some(options) = suggest {
                        let joined = join_options(&options);
                        self.say_template("suggest_values", &[("options", &joined)]);
                    }
                }
            }
        }
        let trav = self.ctx.tree.traverse_next_leaf(self.config)?;
        self.advance(trav)
    }

    pub fn handle_yes(&mut self) -> Result<(), DialogueError> {
        match self.incoming.take() {
            Some(Pending::Confirmation { task, leaf, entity, value }) => {
                self.accept(&task, leaf, &entity, &value)?;
                let trav = self.ctx.tree.traverse_next_leaf(self.config)?;
                self.advance(trav)
            }
            Some(Pending::RepeatOffer { task }) => {
                self.ctx.tree.reset_task(&task)?;
                self.effect.tree_ops.push(TreeOp::ResetTask(task.clone()));
                let trav = self.ctx.tree.add_task(self.config, &task)?;
                self.effect.tree_ops.push(TreeOp::AddTask(task.clone()));
                self.announce(&task);
                self.advance(trav)
            }
            other => {
                self.incoming = other;
                self.fallback_clarify()
            }
        }
    }

    pub fn handle_no(&mut self) -> Result<(), DialogueError> {
        match self.incoming.take() {
            Some(Pending::Confirmation { leaf, entity, .. }) => {
                self.ctx.tree.mark_slot(leaf, &entity, SlotStatus::Asked)?;
                self.prompt_current()
            }
            Some(Pending::RepeatOffer { .. }) => {
                self.say_template("anything_else", &[]);
                Ok(())
            }
            other => {
                self.incoming = other;
                self.fallback_clarify()
            }
        }
    }

    pub fn answer_faq(&mut self) -> Result<(), DialogueError> {
        match self.single.nlu.faq.clone() {
            Some(faq) => {
                self.say_text(&[faq.answer], None);
                self.follow_up()
            }
            None => self.fallback_clarify(),
        }
    }

    pub fn confirm_entity(&mut self) -> Result<(), DialogueError> {
        self.follow_up()
    }

    pub fn disambiguate(&mut self) -> Result<(), DialogueError> {
        self.follow_up()
    }

    /// Closes the active task if it has succeeded; otherwise keeps asking.
    pub fn finish_active(&mut self) -> Result<(), DialogueError> {
        match self.ctx.tree.active_task().map(str::to_string) {
            Some(t) if self.ctx.tree.task_succeeded(&t) => {
                if let Some(next) = self.finish_task(&t)? {
                    self.advance(next)?;
                }
                Ok(())
            }
            _ => self.follow_up(),
        }
    }

    /// Gives up on the active task.
    pub fn fail_active(&mut self, turn_limit: bool) -> Result<(), DialogueError> {
        let Some(task) = self.ctx.tree.active_task().map(str::to_string) else {
            return self.fallback_clarify();
        };
        self.ctx.tree.quit_task(&task)?;
        self.effect.tree_ops.push(TreeOp::QuitTask(task.clone()));
        self.incoming = None;
        if let Some(next) = self.fail_task(&task, turn_limit)? {
            self.advance(next)?;
        }
        Ok(())
    }

    pub fn fallback_clarify(&mut self) -> Result<(), DialogueError> {
        if let Some(p) = self.incoming.take() {
            self.ask_pending(p);
            return Ok(());
        }
        if self.ctx.tree.cursor().is_some() {
            return self.prompt_current();
        }
        self.say_template("fallback", &[]);
        Ok(())
    }

    pub fn goodbye(&mut self) -> Result<(), DialogueError> {
        self.incoming = None;
        self.say_template("goodbye", &[]);
        Ok(())
    }

    /// Runs a built-in by name. `Ok(false)` when the name is not a built-in.
    pub fn run_builtin(&mut self, name: &str) -> Result<bool, DialogueError> {
        match name {
            "greeting" => self.greeting()?,
            "new_task" | "new_task_with_info" => self.new_task()?,
            "switch_task" => self.switch_task()?,
            "continue_task" => self.continue_task()?,
            "confirm_entity" => self.confirm_entity()?,
            "handle_yes" => self.handle_yes()?,
            "handle_no" => self.handle_no()?,
            "disambiguate" => self.disambiguate()?,
            "answer_faq" => self.answer_faq()?,
            "finish_task" => self.finish_active()?,
            "fail_task" => self.fail_active(false)?,
            "quit_task_turn_limit" => self.fail_active(true)?,
            "fallback_clarify" => self.fallback_clarify()?,
            "goodbye" => self.goodbye()?,
            _ => return Ok(false),
        }
        Ok(true)
    }
}
