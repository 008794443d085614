use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BotConfig, GroupOperator, SemanticType, SuccessExpr};
use crate::dialogue::actions::BUILTIN_ACTIONS;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl Issue {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Issue::new(path, message));
    }

    fn warn(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Issue::new(path, message));
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "error   {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning {w}")?;
        }
        write!(f, "{} error(s), {} warning(s)", self.errors.len(), self.warnings.len())
    }
}

/// Referential-integrity check against the built-in action set.
pub fn validate_config(config: &BotConfig) -> ValidationReport {
    validate_config_with_actions(config, BUILTIN_ACTIONS)
}

/// Like [`validate_config`], with the policy checked against `actions`
/// (built-ins plus any custom actions the caller registers).
pub fn validate_config_with_actions(config: &BotConfig, actions: &[&str]) -> ValidationReport {
    let mut r = ValidationReport::default();

    if !(0.0..=1.0).contains(&config.intent_threshold) {
        r.error(
            "bot.intent_threshold",
            format!("threshold {} is outside [0, 1]", config.intent_threshold),
        );
    }

    check_entities(config, &mut r);
    check_tasks(config, &mut r);
    check_cycles(config, &mut r);

    for (i, faq) in config.faqs.iter().enumerate() {
        if faq.question.trim().is_empty() {
            r.error(format!("faq[{i}].question"), "question must not be empty");
        }
        if faq.answer.trim().is_empty() {
            r.error(format!("faq[{i}].answer"), "answer must not be empty");
        }
    }

    for issue in config.policy.check(actions) {
        r.errors.push(issue);
    }

    r
}

fn check_entities(config: &BotConfig, r: &mut ValidationReport) {
    for (name, def) in &config.entities {
        let path = format!("entities.{name}");
        match def.semantic_type {
            Some(SemanticType::Picklist) => {
                let ok = def
                    .methods
                    .fuzzy_matching
                    .as_ref()
                    .is_some_and(|c| c.iter().any(|s| !s.trim().is_empty()));
                if !ok {
                    r.error(path, "PICKLIST needs fuzzy_matching with at least one candidate");
                }
            }
            Some(SemanticType::UserUtt) if !def.methods.user_utterance => {
                r.error(path, "USER_UTT needs the user_utterance method");
            }
            _ => {}
        }
    }
}

fn check_tasks(config: &BotConfig, r: &mut ValidationReport) {
    if config.user_tasks().next().is_none() {
        r.warn("tasks", "no user tasks are defined");
    }

    let referenced: HashSet<&str> = config
        .tasks
        .values()
        .filter_map(|t| t.success.as_ref())
        .flat_map(|s| s.task_refs())
        .collect();

    for task in config.tasks.values() {
        let base = format!("tasks.{}", task.name);
        if task.polarity().is_some() {
            continue;
        }
        if task.max_turns < 1 {
            r.error(format!("{base}.max_turns"), "max_turns must be at least 1");
        }
        if !task.repeat_response.is_empty() && !task.repeat {
            r.error(format!("{base}.repeat_response"), "repeat_response requires repeat: yes");
        }
        if task.samples.is_empty() && !referenced.contains(task.name.as_str()) {
            r.warn(
                base.clone(),
                "task has no samples and no other task references it, so it is unreachable",
            );
        }

        for (ename, _) in &task.entity_specs {
            if config.entity(ename).is_none() {
                r.error(
                    format!("{base}.entities.{ename}"),
                    format!("entity `{ename}` is not defined in the entity config"),
                );
            }
        }

        let mut grouped = HashSet::new();
        for (gname, group) in &task.entity_groups {
            let gpath = format!("{base}.entity_groups.{gname}");
            if group.members.is_empty() {
                r.error(gpath.clone(), "group has no members");
            }
            for m in &group.members {
                grouped.insert(m.as_str());
                if !task.entity_specs.contains_key(m) {
                    r.error(gpath.clone(), format!("member `{m}` is not listed under entities"));
                }
            }
            if let Some(k) = group.min_required {
                if k == 0 || k > group.members.len() {
                    r.error(
                        format!("{gpath}.min_required"),
                        format!("min_required {k} must be between 1 and {}", group.members.len()),
                    );
                }
            }
        }
        for ename in task.entity_specs.keys() {
            if !grouped.contains(ename.as_str()) {
                r.warn(
                    format!("{base}.entities.{ename}"),
                    "entity is not a member of any group and will never be asked",
                );
            }
        }

        let spath = format!("{base}.success");
        let Some(success) = &task.success else {
            r.error(spath, "task has no success expression");
            continue;
        };
        success.walk(&mut |e| match e {
            SuccessExpr::Or(c) if c.len() == 1 => {
                r.warn(spath.clone(), "OR with a single child behaves like AND");
            }
            SuccessExpr::Group { operator, group } => match task.entity_groups.get(group) {
                None => r.error(spath.clone(), format!("group `{group}` is not defined")),
                Some(g) => {
                    if *operator != GroupOperator::Inform {
                        for m in &g.members {
                            let extractable = config
                                .entity(m)
                                .is_some_and(|d| d.semantic_type.is_some());
                            if config.entity(m).is_some() && !extractable {
                                r.warn(
                                    spath.clone(),
                                    format!("entity `{m}` has no type and cannot be extracted for {operator}"),
                                );
                            }
                        }
                    }
                }
            },
            SuccessExpr::TaskRef(t) => match config.task(t) {
                None => r.error(spath.clone(), format!("sub-task `{t}` is not defined")),
                Some(d) if d.polarity().is_some() => {
                    r.error(spath.clone(), format!("`{t}` is a polarity task and cannot be a sub-task"))
                }
                Some(_) => {}
            },
            _ => {}
        });
    }
}

/// Sub-task references must form a DAG. Three-colour DFS; each back edge is reported once.
fn check_cycles(config: &BotConfig, r: &mut ValidationReport) {
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        White,
        Grey,
        Black,
    }

    let edges: HashMap<&str, Vec<&str>> = config
        .tasks
        .values()
        .map(|t| {
            let refs = t.success.as_ref().map(|s| s.task_refs()).unwrap_or_default();
            (t.name.as_str(), refs.into_iter().filter(|n| config.tasks.contains_key(*n)).collect())
        })
        .collect();
    let mut colour: HashMap<&str, Colour> = edges.keys().map(|k| (*k, Colour::White)).collect();

    fn visit<'a>(
        node: &'a str,
        edges: &HashMap<&'a str, Vec<&'a str>>,
        colour: &mut HashMap<&'a str, Colour>,
        path: &mut Vec<&'a str>,
        r: &mut ValidationReport,
    ) {
        colour.insert(node, Colour::Grey);
        path.push(node);
        for &next in &edges[node] {
            match colour[next] {
                Colour::White => visit(next, edges, colour, path, r),
                Colour::Grey => {
                    let start = path.iter().position(|n| *n == next).unwrap_or(0);
                    let mut cycle: Vec<&str> = path[start..].to_vec();
                    cycle.push(next);
                    r.error(
                        format!("tasks.{node}.success"),
                        format!("sub-task cycle: {}", cycle.join(" -> ")),
                    );
                }
                Colour::Black => {}
            }
        }
        path.pop();
        colour.insert(node, Colour::Black);
    }

    for task in config.tasks.keys() {
        if colour[task.as_str()] == Colour::White {
            visit(task.as_str(), &edges, &mut colour, &mut Vec::new(), r);
        }
    }
}
