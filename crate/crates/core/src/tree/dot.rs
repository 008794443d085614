use std::fmt::Write;

use super::{NodeKind, TaskTree, TreeError};
use crate::config::BotConfig;

/// Graphviz description of a task's static structure, with referenced sub-tasks drawn as
/// separate roots joined by dashed edges.
pub fn task_to_dot(config: &BotConfig, task: &str) -> Result<String, TreeError> {
    let def = config
        .task(task)
        .filter(|t| t.success.is_some())
        .ok_or_else(|| TreeError::UnknownTask(task.to_string()))?;
    let mut tree = TaskTree::new();
    tree.build_task_subtree(def)?;
    // Build referenced tasks transitively so dashed edges have a target.
    let mut i = 0;
    loop {
        let refs: Vec<String> = tree
            .nodes()
            .iter()
            .filter_map(|n| n.ref_target.clone())
            .filter(|t| tree.task_root(t).is_none())
            .collect();
        if refs.is_empty() || i > config.tasks.len() {
            break;
        }
        for r in refs {
            let d = config.task(&r).ok_or_else(|| TreeError::UnresolvedTask(r.clone()))?;
            tree.build_task_subtree(d)?;
        }
        i += 1;
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(task));
    let _ = writeln!(out, "  node [fontname=\"Helvetica\"];");
    for n in tree.nodes().iter().skip(1) {
        let shape = match n.kind {
            NodeKind::TaskRoot => "doubleoctagon",
            NodeKind::And => "box",
            NodeKind::Or => "diamond",
            NodeKind::Leaf => "ellipse",
            NodeKind::Ref => "note",
        };
        let mut label = n.label.clone();
        if let Some(leaf) = &n.leaf {
            let members: Vec<&str> = leaf.slots.iter().map(|s| s.entity_name.as_str()).collect();
            label = format!("{label}\\n[{}]", members.join(", "));
        }
        let _ = writeln!(out, "  n{} [label=\"{}\", shape={shape}];", n.id, escape(&label));
    }
    for n in tree.nodes().iter().skip(1) {
        for c in &n.children {
            let _ = writeln!(out, "  n{} -> n{};", n.id, c);
        }
        if let Some(target) = n.ref_target.as_deref().and_then(|t| tree.task_root(t)) {
            let _ = writeln!(out, "  n{} -> n{target} [style=dashed];", n.id);
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('"', "\\\"")
}
