//! Policy Decision Tree: condition nodes over the dialogue state with action-name leaves.

use serde::{Deserialize, Serialize};
use serde_yaml::Value;
use thiserror::Error;

use super::condition::{parse_condition_expr, ConditionError, ConditionExpr, StateSnapshot};
use crate::config::Issue;

const DEFAULT_POLICY: &str = include_str!("default_policy.yaml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyNode {
    Condition {
        cond: ConditionExpr,
        children: Vec<PolicyNode>,
    },
    Action {
        action: String,
    },
}

impl PolicyNode {
    pub fn condition(cond: ConditionExpr, children: Vec<PolicyNode>) -> Self {
        PolicyNode::Condition { cond, children }
    }

    pub fn action(name: impl Into<String>) -> Self {
        PolicyNode::Action { action: name.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyTreeDef {
    pub root: PolicyNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("no action leaf was reached")]
    NoActionReached,
    #[error("condition `{cond}` failed: {source}")]
    Condition {
        cond: String,
        #[source]
        source: ConditionError,
    },
}

/// Structural error while reading a policy document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct PolicyDefError {
    pub path: String,
    pub message: String,
}

impl PolicyTreeDef {
    /// The shipped tree.
    pub fn default_tree() -> Self {
        let value: Value = serde_yaml::from_str(DEFAULT_POLICY).expect("shipped policy parses");
        Self::from_value(&value).expect("shipped policy is well formed")
    }

    /// Reads `{cond, children}` / `{action}` nodes. A top-level list is wrapped in an
    /// always-true root.
    pub fn from_value(v: &Value) -> Result<Self, PolicyDefError> {
        let root = match v {
            Value::Sequence(items) => PolicyNode::condition(
                ConditionExpr::always(),
                items
                    .iter()
                    .enumerate()
                    .map(|(i, n)| node_from_value(n, &format!("[{i}]")))
                    .collect::<Result<_, _>>()?,
            ),
            other => node_from_value(other, "root")?,
        };
        Ok(Self { root })
    }

    /// First action leaf reached by a depth-first, left-to-right walk that enters a
    /// condition's children only when the condition holds.
    pub fn select_action(&self, state: &StateSnapshot) -> Result<&str, PolicyError> {
        fn dfs<'a>(node: &'a PolicyNode, state: &StateSnapshot) -> Result<Option<&'a str>, PolicyError> {
            match node {
                PolicyNode::Action { action } => Ok(Some(action)),
                PolicyNode::Condition { cond, children } => {
                    let holds = cond.evaluate(state).map_err(|source| PolicyError::Condition {
                        cond: cond.to_string(),
                        source,
                    })?;
                    if !holds {
                        return Ok(None);
                    }
                    for child in children {
                        if let Some(a) = dfs(child, state)? {
                            return Ok(Some(a));
                        }
                    }
                    Ok(None)
                }
            }
        }
        dfs(&self.root, state)?.ok_or(PolicyError::NoActionReached)
    }

    /// Action names in leaf order (duplicates kept).
    pub fn actions(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn go<'a>(n: &'a PolicyNode, out: &mut Vec<&'a str>) {
            match n {
                PolicyNode::Action { action } => out.push(action),
                PolicyNode::Condition { children, .. } => children.iter().for_each(|c| go(c, out)),
            }
        }
        go(&self.root, &mut out);
        out
    }

    /// True when some leaf is reachable through literal-`true` conditions only, which
    /// makes [`Self::select_action`] total.
    pub fn has_fallback(&self) -> bool {
        fn go(n: &PolicyNode) -> bool {
            match n {
                PolicyNode::Action { .. } => true,
                PolicyNode::Condition { cond, children } => {
                    *cond == ConditionExpr::Literal(true) && children.iter().any(go)
                }
            }
        }
        go(&self.root)
    }

    /// Load-time checks: registered actions, known condition paths, a fallback leaf.
    pub fn check(&self, registered: &[&str]) -> Vec<Issue> {
        let mut issues = Vec::new();
        fn go(n: &PolicyNode, path: String, registered: &[&str], issues: &mut Vec<Issue>) {
            match n {
                PolicyNode::Action { action } => {
                    if !registered.contains(&action.as_str()) {
                        issues.push(Issue {
                            path,
                            message: format!("action `{action}` is not registered"),
                        });
                    }
                }
                PolicyNode::Condition { cond, children } => {
                    if let Err(e) = cond.check() {
                        issues.push(Issue {
                            path: path.clone(),
                            message: format!("condition `{cond}`: {e}"),
                        });
                    }
                    if children.is_empty() {
                        issues.push(Issue {
                            path: path.clone(),
                            message: "condition node has no children".into(),
                        });
                    }
                    for (i, c) in children.iter().enumerate() {
                        go(c, format!("{path}.children[{i}]"), registered, issues);
                    }
                }
            }
        }
        go(&self.root, "policy".into(), registered, &mut issues);
        if !self.has_fallback() {
            issues.push(Issue {
                path: "policy".into(),
                message: "no unconditional fallback leaf; some states would reach no action".into(),
            });
        }
        issues
    }
}

fn node_from_value(v: &Value, path: &str) -> Result<PolicyNode, PolicyDefError> {
    let err = |message: String| PolicyDefError {
        path: path.to_string(),
        message,
    };
    let m = v
        .as_mapping()
        .ok_or_else(|| err("expected a {cond, children} or {action} mapping".into()))?;
    for k in m.keys() {
        match k.as_str() {
            Some("cond" | "children" | "action") => {}
            _ => return Err(err(format!("unknown key {k:?}"))),
        }
    }
    if let Some(a) = m.get("action") {
        if m.contains_key("cond") || m.contains_key("children") {
            return Err(err("an action leaf cannot have `cond` or `children`".into()));
        }
        let name = a
            .as_str()
            .ok_or_else(|| err("action must be a name".into()))?;
        return Ok(PolicyNode::action(name));
    }
    let text = match m.get("cond") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Bool(b)) => b.to_string(),
        Some(_) => return Err(err("cond must be an expression string".into())),
        None => return Err(err("node needs `cond` or `action`".into())),
    };
    let cond = parse_condition_expr(&text).map_err(|e| err(format!("in `{text}`: {e}")))?;
    let children = match m.get("children") {
        Some(Value::Sequence(items)) => items
            .iter()
            .enumerate()
            .map(|(i, c)| node_from_value(c, &format!("{path}.children[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(err("condition node needs a `children` list".into())),
    };
    Ok(PolicyNode::condition(cond, children))
}
