use serde::{Deserialize, Serialize};

use super::{NodeId, NodeKind, TaskTree};

/// Read-only projection of a [`TaskTree`] for clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSnapshot {
    pub nodes: Vec<SnapshotNode>,
    pub cursor: Option<CursorSummary>,
    /// Paused tasks, bottom of the stack first.
    pub stack: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub label: String,
    pub success: bool,
    pub exhausted: bool,
    pub current: bool,
    /// For `ref` nodes, the id of the target task root once it exists.
    #[serde(rename = "ref")]
    pub ref_target: Option<NodeId>,
    pub children: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CursorSummary {
    pub task: String,
    pub leaf: NodeId,
    pub entity: String,
}

impl TreeSnapshot {
    pub fn of(tree: &TaskTree) -> Self {
        let current = tree.cursor().map(|c| c.leaf);
        let nodes = tree
            .nodes()
            .iter()
            .map(|n| SnapshotNode {
                id: n.id,
                kind: n.kind,
                label: n.label.clone(),
                success: n.success,
                exhausted: n.exhausted,
                current: Some(n.id) == current,
                ref_target: match n.kind {
                    NodeKind::Ref => n.ref_target.as_deref().and_then(|t| tree.task_root(t)),
                    _ => None,
                },
                children: n.children.clone(),
            })
            .collect();
        Self {
            nodes,
            cursor: tree.cursor().map(|c| CursorSummary {
                task: c.task.clone(),
                leaf: c.leaf,
                entity: c.entity.clone(),
            }),
            stack: tree.stack().iter().map(|f| f.task.clone()).collect(),
        }
    }

    pub fn node(&self, id: NodeId) -> Option<&SnapshotNode> {
        self.nodes.iter().find(|n| n.id == id)
    }
}
