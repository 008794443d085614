//! Success expressions: the and-or formula that decides when a task is done.

use serde::{Deserialize, Serialize};
use serde_yaml::{Mapping, Value};
use thiserror::Error;

/// How a leaf group is satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GroupOperator {
    /// The backend must confirm each value.
    Verify,
    /// Values are stored as given.
    Insert,
    /// The backend answer (true/false) decides the branch.
    Api,
    /// The backend delivers information; the user is never asked.
    Inform,
}

impl GroupOperator {
    pub fn keyword(self) -> &'static str {
        match self {
            GroupOperator::Verify => "VERIFY",
            GroupOperator::Insert => "INSERT",
            GroupOperator::Api => "API",
            GroupOperator::Inform => "INFORM",
        }
    }

    fn from_keyword(key: &str) -> Option<Self> {
        match key {
            "VERIFY" => Some(GroupOperator::Verify),
            "INSERT" => Some(GroupOperator::Insert),
            "API" => Some(GroupOperator::Api),
            "INFORM" => Some(GroupOperator::Inform),
            _ => None,
        }
    }

    /// Failed extraction attempts tolerated before a slot is given up.
    pub fn retry_limit(self) -> u32 {
        match self {
            GroupOperator::Insert => 1,
            GroupOperator::Verify | GroupOperator::Api | GroupOperator::Inform => 0,
        }
    }
}

impl std::fmt::Display for GroupOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuccessExpr {
    And(Vec<SuccessExpr>),
    Or(Vec<SuccessExpr>),
    Group { operator: GroupOperator, group: String },
    TaskRef(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuccessExprError {
    #[error("unknown operator `{0}` (expected AND, OR, VERIFY, INSERT, API, INFORM or TASK)")]
    UnknownOperator(String),
    #[error("operator {operator} takes exactly one {what}, got {count}")]
    Arity {
        operator: String,
        what: &'static str,
        count: usize,
    },
    #[error("{0}")]
    Malformed(String),
}

impl SuccessExpr {
    pub fn and(children: Vec<SuccessExpr>) -> Self {
        SuccessExpr::And(children)
    }

    pub fn or(children: Vec<SuccessExpr>) -> Self {
        SuccessExpr::Or(children)
    }

    pub fn group(operator: GroupOperator, group: impl Into<String>) -> Self {
        SuccessExpr::Group {
            operator,
            group: group.into(),
        }
    }

    pub fn task(name: impl Into<String>) -> Self {
        SuccessExpr::TaskRef(name.into())
    }

    /// Wraps a bare leaf or task reference in a single-child `And`.
    pub fn normalized(self) -> Self {
        match self {
            e @ (SuccessExpr::Group { .. } | SuccessExpr::TaskRef(_)) => SuccessExpr::And(vec![e]),
            other => other,
        }
    }

    /// Every group name referenced, in left-to-right order.
    pub fn groups(&self) -> Vec<(GroupOperator, &str)> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let SuccessExpr::Group { operator, group } = e {
                out.push((*operator, group.as_str()));
            }
        });
        out
    }

    /// Every sub-task referenced, in left-to-right order.
    pub fn task_refs(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let SuccessExpr::TaskRef(t) = e {
                out.push(t.as_str());
            }
        });
        out
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SuccessExpr)) {
        f(self);
        if let SuccessExpr::And(c) | SuccessExpr::Or(c) = self {
            for child in c {
                child.walk(f);
            }
        }
    }

    /// Converts back to the structured form accepted by [`compile_success_expression`].
    pub fn to_value(&self) -> Value {
        let (key, body) = match self {
            SuccessExpr::And(c) => ("AND", Value::Sequence(c.iter().map(Self::to_value).collect())),
            SuccessExpr::Or(c) => ("OR", Value::Sequence(c.iter().map(Self::to_value).collect())),
            SuccessExpr::Group { operator, group } => (
                operator.keyword(),
                Value::Sequence(vec![Value::String(group.clone())]),
            ),
            SuccessExpr::TaskRef(t) => ("TASK", Value::Sequence(vec![Value::String(t.clone())])),
        };
        let mut m = Mapping::new();
        m.insert(Value::String(key.to_string()), body);
        Value::Mapping(m)
    }
}

/// Compiles one structured success block (`{AND: [...]}`, `{VERIFY: [group]}`, ...).
///
/// Child order is preserved. The result is not normalized; see [`SuccessExpr::normalized`].
pub fn compile_success_expression(raw: &Value) -> Result<SuccessExpr, SuccessExprError> {
    let map = match raw {
        Value::Mapping(m) => m,
        other => {
            return Err(SuccessExprError::Malformed(format!(
                "expected a single-key mapping, found {}",
                value_kind(other)
            )))
        }
    };
    if map.len() != 1 {
        return Err(SuccessExprError::Malformed(format!(
            "expected exactly one operator key, found {}",
            map.len()
        )));
    }
    let (key, body) = map.iter().next().expect("len checked");
    let key = key
        .as_str()
        .ok_or_else(|| SuccessExprError::Malformed("operator key must be a string".into()))?;

    match key {
        "AND" | "OR" => {
            let items = body.as_sequence().ok_or_else(|| {
                SuccessExprError::Malformed(format!("{key} expects a list of expressions"))
            })?;
            if items.is_empty() {
                return Err(SuccessExprError::Malformed(format!(
                    "{key} needs at least one child"
                )));
            }
            let children = items
                .iter()
                .map(compile_success_expression)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if key == "AND" {
                SuccessExpr::And(children)
            } else {
                SuccessExpr::Or(children)
            })
        }
        "TASK" => Ok(SuccessExpr::TaskRef(single_name(key, body, "task")?)),
        other => match GroupOperator::from_keyword(other) {
            Some(operator) => Ok(SuccessExpr::Group {
                operator,
                group: single_name(key, body, "group")?,
            }),
            None => Err(SuccessExprError::UnknownOperator(other.to_string())),
        },
    }
}

fn single_name(operator: &str, body: &Value, what: &'static str) -> Result<String, SuccessExprError> {
    match body {
        Value::String(s) => Ok(s.clone()),
        Value::Sequence(items) => {
            if items.len() != 1 {
                return Err(SuccessExprError::Arity {
                    operator: operator.to_string(),
                    what,
                    count: items.len(),
                });
            }
            items[0].as_str().map(str::to_string).ok_or_else(|| {
                SuccessExprError::Malformed(format!("{operator} expects a {what} name"))
            })
        }
        Value::Null => Err(SuccessExprError::Arity {
            operator: operator.to_string(),
            what,
            count: 0,
        }),
        other => Err(SuccessExprError::Malformed(format!(
            "{operator} expects a list with one {what} name, found {}",
            value_kind(other)
        ))),
    }
}

pub(crate) fn value_kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Sequence(_) => "a list",
        Value::Mapping(_) => "a mapping",
        Value::Tagged(_) => "a tagged value",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yaml(s: &str) -> Value {
        serde_yaml::from_str(s).unwrap()
    }

    #[test]
    fn verify_leaf() {
        let e = compile_success_expression(&yaml("VERIFY:\n  - ssn_group\n")).unwrap();
        assert_eq!(e, SuccessExpr::group(GroupOperator::Verify, "ssn_group"));
    }

    #[test]
    fn and_preserves_child_order() {
        let e = compile_success_expression(&yaml(
            "AND:\n  - VERIFY:\n    - g1\n  - VERIFY:\n    - g2\n",
        ))
        .unwrap();
        assert_eq!(
            e,
            SuccessExpr::and(vec![
                SuccessExpr::group(GroupOperator::Verify, "g1"),
                SuccessExpr::group(GroupOperator::Verify, "g2"),
            ])
        );
    }

    #[test]
    fn unknown_operator() {
        let err = compile_success_expression(&yaml("XOR:\n  - VERIFY: [a]\n")).unwrap_err();
        assert_eq!(err, SuccessExprError::UnknownOperator("XOR".into()));
    }

    #[test]
    fn leaf_with_two_groups_is_arity_error() {
        let err = compile_success_expression(&yaml("INSERT: [a, b]")).unwrap_err();
        assert!(matches!(err, SuccessExprError::Arity { count: 2, .. }));
    }

    #[test]
    fn empty_and_rejected() {
        assert!(compile_success_expression(&yaml("AND: []")).is_err());
    }

    #[test]
    fn normalization_wraps_bare_leaf() {
        let e = SuccessExpr::task("verify").normalized();
        assert_eq!(e, SuccessExpr::and(vec![SuccessExpr::task("verify")]));
        let or = SuccessExpr::or(vec![SuccessExpr::task("a")]);
        assert_eq!(or.clone().normalized(), or);
    }
}
