//! The and-or Task Tree.
//!
//! All task roots hang off one Or root. A task that uses another as a sub-task holds a
//! `Ref` node pointing at the other task's root, never a copy, so a sub-task completed
//! once stays completed for every task that needs it.

mod dot;
mod snapshot;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{BotConfig, GroupOperator, SuccessExpr, TaskDef};

pub use dot::task_to_dot;
pub use snapshot::{CursorSummary, SnapshotNode, TreeSnapshot};

pub type NodeId = usize;

pub const ROOT: NodeId = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    And,
    Or,
    Leaf,
    TaskRoot,
    Ref,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotStatus {
    Unasked,
    Asked,
    Confirming,
    FilledOk,
    Failed,
}

impl SlotStatus {
    /// Still worth asking about.
    pub fn is_open(self) -> bool {
        matches!(self, SlotStatus::Unasked | SlotStatus::Asked | SlotStatus::Confirming)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafSlotState {
    pub entity_name: String,
    pub status: SlotStatus,
    pub accepted_value: Option<String>,
    pub attempts: u32,
}

impl LeafSlotState {
    fn new(entity_name: &str) -> Self {
        Self {
            entity_name: entity_name.to_string(),
            status: SlotStatus::Unasked,
            accepted_value: None,
            attempts: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafPayload {
    pub group: String,
    pub operator: GroupOperator,
    pub slots: Vec<LeafSlotState>,
    pub min_required: usize,
    pub retry_limit: u32,
}

impl LeafPayload {
    pub fn filled(&self) -> usize {
        self.slots.iter().filter(|s| s.status == SlotStatus::FilledOk).count()
    }

    pub fn failed(&self) -> usize {
        self.slots.iter().filter(|s| s.status == SlotStatus::Failed).count()
    }

    pub fn slot(&self, entity: &str) -> Option<&LeafSlotState> {
        self.slots.iter().find(|s| s.entity_name == entity)
    }

    /// The first member still open, in group order.
    pub fn next_open(&self) -> Option<&LeafSlotState> {
        self.slots.iter().find(|s| s.status.is_open())
    }

    fn is_success(&self) -> bool {
        self.filled() >= self.min_required
    }

    fn is_exhausted(&self) -> bool {
        !self.is_success() && self.slots.len() - self.failed() < self.min_required
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRootInfo {
    pub name: String,
    pub repeat: bool,
    pub max_turns: u32,
    /// Forced failure (turn limit).
    pub quit: bool,
    /// Finished (either way) and popped; a paused frame for it is not resumed.
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub label: String,
    pub success: bool,
    pub exhausted: bool,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub leaf: Option<LeafPayload>,
    pub ref_target: Option<String>,
    pub task: Option<TaskRootInfo>,
}

impl TaskNode {
    fn new(id: NodeId, kind: NodeKind, label: String, parent: Option<NodeId>) -> Self {
        Self {
            id,
            kind,
            label,
            success: false,
            exhausted: false,
            parent,
            children: Vec::new(),
            leaf: None,
            ref_target: None,
            task: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cursor {
    pub task: String,
    pub leaf: NodeId,
    pub entity: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    /// Paused because the user asked for another task.
    Switch,
    /// Waiting for a sub-task it references.
    Subtask,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackFrame {
    pub task: String,
    pub cursor: Option<Cursor>,
    pub kind: FrameKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Traversal {
    /// Cursor placed on an open leaf. `entered` lists sub-tasks descended into on the way.
    Leaf { cursor: Cursor, entered: Vec<String> },
    TaskComplete(String),
    TaskFailed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PopResult {
    Resumed(Traversal),
    Idle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotOutcome {
    Ok(String),
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TurnLimit {
    Within,
    Exceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("task `{0}` is already complete and not repeatable")]
    TaskAlreadyComplete(String),
    #[error("task `{0}` is already in progress")]
    AlreadyActive(String),
    #[error("task `{0}` is not repeatable")]
    TaskNotRepeatable(String),
    #[error("sub-task `{0}` is not defined")]
    UnresolvedTask(String),
    #[error("node {0} is not the current leaf")]
    NotCurrentLeaf(NodeId),
    #[error("node {0} is not a leaf")]
    NotALeaf(NodeId),
    #[error("entity `{entity}` is not a member of leaf {leaf}")]
    UnknownEntity { leaf: NodeId, entity: String },
    #[error("no task is active")]
    NoActiveTask,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskTree {
    nodes: Vec<TaskNode>,
    task_nodes: IndexMap<String, NodeId>,
    active: Option<String>,
    cursor: Option<Cursor>,
    stack: Vec<StackFrame>,
    per_task_turns: IndexMap<String, u32>,
}

impl Default for TaskTree {
    fn default() -> Self {
        Self::new()
    }
}

impl TaskTree {
    pub fn new() -> Self {
        Self {
            nodes: vec![TaskNode::new(ROOT, NodeKind::Or, "root".into(), None)],
            task_nodes: IndexMap::new(),
            active: None,
            cursor: None,
            stack: Vec::new(),
            per_task_turns: IndexMap::new(),
        }
    }

    // -- accessors ---------------------------------------------------------

    pub fn node(&self, id: NodeId) -> Option<&TaskNode> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> &[TaskNode] {
        &self.nodes
    }

    pub fn leaf(&self, id: NodeId) -> Option<&LeafPayload> {
        self.nodes.get(id).and_then(|n| n.leaf.as_ref())
    }

    pub fn task_root(&self, task: &str) -> Option<NodeId> {
        self.task_nodes.get(task).copied()
    }

    pub fn task_names(&self) -> impl Iterator<Item = &str> {
        self.task_nodes.keys().map(String::as_str)
    }

    pub fn task_info(&self, task: &str) -> Option<&TaskRootInfo> {
        self.task_root(task).and_then(|id| self.nodes[id].task.as_ref())
    }

    pub fn task_succeeded(&self, task: &str) -> bool {
        self.task_root(task).is_some_and(|id| self.nodes[id].success)
    }

    pub fn active_task(&self) -> Option<&str> {
        self.active.as_deref()
    }

    pub fn cursor(&self) -> Option<&Cursor> {
        self.cursor.as_ref()
    }

    pub fn stack(&self) -> &[StackFrame] {
        &self.stack
    }

    /// The active task or any paused one.
    pub fn is_open(&self, task: &str) -> bool {
        self.active.as_deref() == Some(task) || self.stack.iter().any(|f| f.task == task)
    }

    pub fn task_turns(&self, task: &str) -> u32 {
        self.per_task_turns.get(task).copied().unwrap_or(0)
    }

    /// The task that started the current chain of sub-tasks (itself when not in a sub-task).
    pub fn chain_owner(&self) -> Option<&str> {
        let mut owner = self.active.as_deref()?;
        for f in self.stack.iter().rev() {
            if f.kind == FrameKind::Subtask {
                owner = &f.task;
            } else {
                break;
            }
        }
        Some(owner)
    }

    /// Sub-task chain above the active task, outermost first (`[parent, ..., active]`).
    pub fn subtask_chain(&self) -> Vec<&str> {
        let Some(active) = self.active.as_deref() else {
            return Vec::new();
        };
        let mut chain = vec![active];
        for f in self.stack.iter().rev() {
            if f.kind == FrameKind::Subtask {
                chain.push(&f.task);
            } else {
                break;
            }
        }
        chain.reverse();
        chain
    }

    /// Values accepted so far for every slot of a task, in tree order (sub-tasks excluded).
    pub fn collected(&self, task: &str) -> IndexMap<String, String> {
        let mut out = IndexMap::new();
        if let Some(root) = self.task_root(task) {
            self.walk_task(root, &mut |n| {
                if let Some(leaf) = &n.leaf {
                    for s in &leaf.slots {
                        if let (SlotStatus::FilledOk, Some(v)) = (s.status, &s.accepted_value) {
                            out.insert(s.entity_name.clone(), v.clone());
                        }
                    }
                }
            });
        }
        out
    }

    /// Visits a task's own nodes; does not follow `Ref`s.
    fn walk_task(&self, id: NodeId, f: &mut impl FnMut(&TaskNode)) {
        let n = &self.nodes[id];
        f(n);
        for &c in &n.children {
            self.walk_task(c, f);
        }
    }

    // -- construction ------------------------------------------------------

    /// Builds a task's subtree under the root. Referenced sub-tasks are not built here;
    /// their `Ref` nodes resolve when traversal reaches them.
    pub fn build_task_subtree(&mut self, task: &TaskDef) -> Result<NodeId, TreeError> {
        if let Some(id) = self.task_root(&task.name) {
            return Ok(id);
        }
        let success = task
            .success
            .clone()
            .ok_or_else(|| TreeError::UnknownTask(task.name.clone()))?
            .normalized();
        let root_id = self.push_node(NodeKind::TaskRoot, task.name.clone(), Some(ROOT));
        self.nodes[root_id].task = Some(TaskRootInfo {
            name: task.name.clone(),
            repeat: task.repeat,
            max_turns: task.max_turns,
            quit: false,
            closed: false,
        });
        self.nodes[ROOT].children.push(root_id);
        self.task_nodes.insert(task.name.clone(), root_id);
        let child = self.build_expr(task, &success, root_id)?;
        self.nodes[root_id].children.push(child);
        self.refresh();
        Ok(root_id)
    }

    fn push_node(&mut self, kind: NodeKind, label: String, parent: Option<NodeId>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(TaskNode::new(id, kind, label, parent));
        id
    }

    fn build_expr(&mut self, task: &TaskDef, e: &SuccessExpr, parent: NodeId) -> Result<NodeId, TreeError> {
        match e {
            SuccessExpr::And(c) | SuccessExpr::Or(c) => {
                let (kind, label) = if matches!(e, SuccessExpr::And(_)) {
                    (NodeKind::And, "AND")
                } else {
                    (NodeKind::Or, "OR")
                };
                let id = self.push_node(kind, label.into(), Some(parent));
                for child in c {
                    let cid = self.build_expr(task, child, id)?;
                    self.nodes[id].children.push(cid);
                }
                Ok(id)
            }
            SuccessExpr::Group { operator, group } => {
                let def = task.entity_groups.get(group);
                let members: Vec<String> = def.map(|g| g.members.clone()).unwrap_or_default();
                let min_required = def.map(|g| g.required()).unwrap_or(0).min(members.len()).max(1);
                let id = self.push_node(NodeKind::Leaf, format!("{operator}: {group}"), Some(parent));
                self.nodes[id].leaf = Some(LeafPayload {
                    group: group.clone(),
                    operator: *operator,
                    slots: members.iter().map(|m| LeafSlotState::new(m)).collect(),
                    min_required,
                    retry_limit: operator.retry_limit(),
                });
                Ok(id)
            }
            SuccessExpr::TaskRef(t) => {
                let id = self.push_node(NodeKind::Ref, format!("TASK: {t}"), Some(parent));
                self.nodes[id].ref_target = Some(t.clone());
                Ok(id)
            }
        }
    }

    // -- success evaluation ------------------------------------------------

    /// Recomputes success and exhaustion for every node, children before parents.
    pub fn refresh(&mut self) {
        let mut done = vec![false; self.nodes.len()];
        let roots: Vec<NodeId> = self.task_nodes.values().copied().collect();
        for r in roots {
            self.compute(r, &mut done, 0);
        }
    }

    fn compute(&mut self, id: NodeId, done: &mut Vec<bool>, depth: usize) -> (bool, bool) {
        if done[id] || depth > 4 * self.nodes.len() {
            return (self.nodes[id].success, self.nodes[id].exhausted);
        }
        let (success, exhausted) = match self.nodes[id].kind {
            NodeKind::Leaf => {
                let leaf = self.nodes[id].leaf.as_ref().expect("leaf payload");
                (leaf.is_success(), leaf.is_exhausted())
            }
            NodeKind::Ref => {
                let target = self.nodes[id].ref_target.clone().unwrap_or_default();
                match self.task_root(&target) {
                    Some(t) => self.compute(t, done, depth + 1),
                    None => (false, false),
                }
            }
            NodeKind::TaskRoot => {
                let child = self.nodes[id].children[0];
                let (s, e) = self.compute(child, done, depth + 1);
                let quit = self.nodes[id].task.as_ref().is_some_and(|t| t.quit);
                (s, !s && (e || quit))
            }
            NodeKind::And => {
                let children = self.nodes[id].children.clone();
                let res: Vec<_> = children.iter().map(|&c| self.compute(c, done, depth + 1)).collect();
                let s = res.iter().all(|r| r.0);
                (s, !s && res.iter().any(|r| r.1))
            }
            NodeKind::Or => {
                let children = self.nodes[id].children.clone();
                let res: Vec<_> = children.iter().map(|&c| self.compute(c, done, depth + 1)).collect();
                let s = res.iter().any(|r| r.0);
                (s, !s && res.iter().all(|r| r.1))
            }
        };
        let n = &mut self.nodes[id];
        n.success = success;
        n.exhausted = exhausted;
        done[id] = true;
        (success, exhausted)
    }

    /// Success label of a node after recomputation.
    pub fn evaluate_success(&mut self, id: NodeId) -> bool {
        self.refresh();
        self.nodes.get(id).is_some_and(|n| n.success)
    }

    // -- task lifecycle ----------------------------------------------------

    /// Starts (or restarts) a task, pausing the active one.
    pub fn add_task(&mut self, config: &BotConfig, name: &str) -> Result<Traversal, TreeError> {
        let def = config
            .task(name)
            .filter(|t| t.polarity().is_none())
            .ok_or_else(|| TreeError::UnknownTask(name.to_string()))?;
        if self.is_open(name) {
            return Err(TreeError::AlreadyActive(name.to_string()));
        }
        if let Some(root) = self.task_root(name) {
            let n = &self.nodes[root];
            let info = n.task.as_ref().expect("task info");
            if n.success {
                if !info.repeat {
                    return Err(TreeError::TaskAlreadyComplete(name.to_string()));
                }
                self.reset_subtree(name);
            } else if n.exhausted {
                self.reset_subtree(name);
            } else {
                self.nodes[root].task.as_mut().expect("task info").closed = false;
            }
        } else {
            self.build_task_subtree(def)?;
        }
        if let Some(active) = self.active.take() {
            self.stack.push(StackFrame {
                task: active,
                cursor: self.cursor.take(),
                kind: FrameKind::Switch,
            });
        }
        self.active = Some(name.to_string());
        self.cursor = None;
        self.traverse_next_leaf(config)
    }

    /// Moves the cursor to the next open leaf of the active task, descending into
    /// unfinished sub-tasks.
    pub fn traverse_next_leaf(&mut self, config: &BotConfig) -> Result<Traversal, TreeError> {
        let mut entered = Vec::new();
        loop {
            self.refresh();
            let task = self.active.clone().ok_or(TreeError::NoActiveTask)?;
            let root = self.task_root(&task).ok_or_else(|| TreeError::UnknownTask(task.clone()))?;
            if self.nodes[root].success {
                self.cursor = None;
                return Ok(Traversal::TaskComplete(task));
            }
            if self.nodes[root].exhausted {
                self.cursor = None;
                return Ok(Traversal::TaskFailed(task));
            }
            match self.find_open(root) {
                Some(Found::Leaf(leaf)) => {
                    let entity = self.nodes[leaf]
                        .leaf
                        .as_ref()
                        .and_then(|l| l.next_open())
                        .map(|s| s.entity_name.clone())
                        .unwrap_or_default();
                    let cursor = Cursor { task, leaf, entity };
                    self.cursor = Some(cursor.clone());
                    return Ok(Traversal::Leaf { cursor, entered });
                }
                Some(Found::Ref(target)) => {
                    let def = config
                        .task(&target)
                        .ok_or_else(|| TreeError::UnresolvedTask(target.clone()))?;
                    match self.task_root(&target) {
                        None => {
                            self.build_task_subtree(def)?;
                        }
                        Some(id) => {
                            if let Some(info) = self.nodes[id].task.as_mut() {
                                info.closed = false;
                            }
                        }
                    }
                    self.stack.push(StackFrame {
                        task: task.clone(),
                        cursor: self.cursor.take(),
                        kind: FrameKind::Subtask,
                    });
                    self.active = Some(target.clone());
                    entered.push(target);
                }
                None => {
                    self.cursor = None;
                    return Ok(Traversal::TaskFailed(task));
                }
            }
        }
    }

    fn find_open(&self, id: NodeId) -> Option<Found> {
        let n = &self.nodes[id];
        if n.success || n.exhausted {
            return None;
        }
        match n.kind {
            NodeKind::Leaf => Some(Found::Leaf(id)),
            NodeKind::Ref => {
                let target = n.ref_target.clone()?;
                // A sub-task already open elsewhere on the stack would recurse forever.
                if self.is_open(&target) {
                    return None;
                }
                Some(Found::Ref(target))
            }
            NodeKind::And | NodeKind::Or | NodeKind::TaskRoot => {
                n.children.iter().find_map(|&c| self.find_open(c))
            }
        }
    }

    /// Closes the active task and resumes the most recent paused one that is still open.
    pub fn finish_or_pop(&mut self, config: &BotConfig) -> Result<PopResult, TreeError> {
        if let Some(task) = self.active.take() {
            if let Some(root) = self.task_root(&task) {
                self.nodes[root].task.as_mut().expect("task info").closed = true;
            }
        }
        self.cursor = None;
        while let Some(frame) = self.stack.pop() {
            let closed = self
                .task_info(&frame.task)
                .map(|i| i.closed)
                .unwrap_or(true);
            if closed {
                continue;
            }
            self.active = Some(frame.task);
            self.cursor = frame.cursor;
            return self.traverse_next_leaf(config).map(PopResult::Resumed);
        }
        Ok(PopResult::Idle)
    }

    /// Forces the task to fail (turn limit).
    pub fn quit_task(&mut self, task: &str) -> Result<(), TreeError> {
        let root = self.task_root(task).ok_or_else(|| TreeError::UnknownTask(task.to_string()))?;
        self.nodes[root].task.as_mut().expect("task info").quit = true;
        self.refresh();
        Ok(())
    }

    /// Clears a repeatable task's own nodes. Referenced sub-tasks keep their state.
    pub fn reset_task(&mut self, task: &str) -> Result<(), TreeError> {
        let info = self.task_info(task).ok_or_else(|| TreeError::UnknownTask(task.to_string()))?;
        if !info.repeat {
            return Err(TreeError::TaskNotRepeatable(task.to_string()));
        }
        self.reset_subtree(task);
        Ok(())
    }

    fn reset_subtree(&mut self, task: &str) {
        let Some(root) = self.task_root(task) else { return };
        let mut ids = Vec::new();
        self.walk_task(root, &mut |n| ids.push(n.id));
        for id in ids {
            let n = &mut self.nodes[id];
            n.success = false;
            n.exhausted = false;
            if let Some(leaf) = n.leaf.as_mut() {
                for s in &mut leaf.slots {
                    *s = LeafSlotState::new(&s.entity_name);
                }
            }
            if let Some(info) = n.task.as_mut() {
                info.quit = false;
                info.closed = false;
            }
        }
        self.per_task_turns.insert(task.to_string(), 0);
        self.refresh();
    }

    /// Counts one user turn against `task`.
    pub fn tick_and_check_turn_limit(&mut self, task: &str) -> TurnLimit {
        let max = self.task_info(task).map(|i| i.max_turns).unwrap_or(u32::MAX);
        let count = self.per_task_turns.entry(task.to_string()).or_insert(0);
        *count += 1;
        if *count > max {
            TurnLimit::Exceeded
        } else {
            TurnLimit::Within
        }
    }

    // -- slot updates ------------------------------------------------------

    /// Records an extraction or backend outcome for a member of the current leaf.
    pub fn record_slot_outcome(&mut self, leaf: NodeId, entity: &str, outcome: SlotOutcome) -> Result<(), TreeError> {
        if self.cursor.as_ref().map(|c| c.leaf) != Some(leaf) {
            return Err(TreeError::NotCurrentLeaf(leaf));
        }
        self.force_slot(leaf, entity, outcome)
    }

    /// Like [`Self::record_slot_outcome`] without the cursor check.
    pub fn force_slot(&mut self, leaf: NodeId, entity: &str, outcome: SlotOutcome) -> Result<(), TreeError> {
        let slot = self.slot_mut(leaf, entity)?;
        let retry_limit = slot.1;
        let slot = slot.0;
        match outcome {
            SlotOutcome::Ok(value) => {
                slot.status = SlotStatus::FilledOk;
                slot.accepted_value = Some(value);
            }
            SlotOutcome::Failed => {
                if slot.status == SlotStatus::FilledOk {
                    return Ok(());
                }
                slot.attempts += 1;
                if slot.attempts > retry_limit {
                    slot.status = SlotStatus::Failed;
                }
            }
        }
        self.refresh();
        Ok(())
    }

    /// Marks an open slot as asked or awaiting confirmation.
    pub fn mark_slot(&mut self, leaf: NodeId, entity: &str, status: SlotStatus) -> Result<(), TreeError> {
        let (slot, _) = self.slot_mut(leaf, entity)?;
        if slot.status.is_open() {
            slot.status = status;
        }
        Ok(())
    }

    fn slot_mut(&mut self, leaf: NodeId, entity: &str) -> Result<(&mut LeafSlotState, u32), TreeError> {
        let payload = self
            .nodes
            .get_mut(leaf)
            .and_then(|n| n.leaf.as_mut())
            .ok_or(TreeError::NotALeaf(leaf))?;
        let retry = payload.retry_limit;
        let slot = payload
            .slots
            .iter_mut()
            .find(|s| s.entity_name == entity)
            .ok_or_else(|| TreeError::UnknownEntity {
                leaf,
                entity: entity.to_string(),
            })?;
        Ok((slot, retry))
    }

    pub fn snapshot(&self) -> TreeSnapshot {
        TreeSnapshot::of(self)
    }
}

enum Found {
    Leaf(NodeId),
    Ref(String),
}

#[cfg(test)]
mod tests;
