//! Template rendering. General responses come from [`ResponseTemplates`]; task-specific
//! lines (prompts, entity responses, finish responses) arrive as literal variants.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ResponseTemplates;

pub const INFO_TOKEN: &str = "<info>";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseEvent {
    /// A named general template with `{slot}` bindings.
    Template {
        name: String,
        bindings: BTreeMap<String, String>,
    },
    /// Configured variants; `<info>` is replaced by the backend message.
    Text {
        variants: Vec<String>,
        info: Option<String>,
    },
}

impl ResponseEvent {
    pub fn template(name: &str, bindings: &[(&str, &str)]) -> Self {
        ResponseEvent::Template {
            name: name.to_string(),
            bindings: bindings.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    pub fn text(variants: Vec<String>, info: Option<String>) -> Self {
        ResponseEvent::Text { variants, info }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NlgError {
    #[error("template `{0}` is not defined")]
    MissingTemplate(String),
    #[error("template `{template}` uses `{{{slot}}}` but no value was bound")]
    UnboundSlot { template: String, slot: String },
}

/// "A", "A and B", "A, B and C".
pub fn join_options<S: AsRef<str>>(items: &[S]) -> String {
    match items {
        [] => String::new(),
        [one] => one.as_ref().to_string(),
        [init @ .., last] => {
            let head: Vec<&str> = init.iter().map(AsRef::as_ref).collect();
            format!("{} and {}", head.join(", "), last.as_ref())
        }
    }
}

fn fill(template_name: &str, text: &str, bindings: &BTreeMap<String, String>) -> Result<String, NlgError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let Some(close) = after.find('}') else {
            out.push_str(&rest[open..]);
            rest = "";
            break;
        };
        let key = &after[..close];
        let is_ident = !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !is_ident {
            out.push('{');
            rest = after;
            continue;
        }
        let v = bindings.get(key).ok_or_else(|| NlgError::UnboundSlot {
            template: template_name.to_string(),
            slot: key.to_string(),
        })?;
        out.push_str(v);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn tidy(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Renders events in order and joins the non-empty pieces with single spaces. `seed`
/// picks among variants (round robin on the turn number keeps replays deterministic).
pub fn render_response(events: &[ResponseEvent], templates: &ResponseTemplates, seed: u64) -> Result<String, NlgError> {
    let mut parts = Vec::new();
    for e in events {
        let piece = match e {
            ResponseEvent::Template { name, bindings } => {
                let variants = templates.get(name).ok_or_else(|| NlgError::MissingTemplate(name.clone()))?;
                let text = &variants[(seed as usize) % variants.len()];
                fill(name, text, bindings)?
            }
            ResponseEvent::Text { variants, info } => {
                if variants.is_empty() {
                    continue;
                }
                let text = &variants[(seed as usize) % variants.len()];
                text.replace(INFO_TOKEN, info.as_deref().unwrap_or(""))
            }
        };
        let piece = tidy(&piece);
        if !piece.is_empty() {
            parts.push(piece);
        }
    }
    Ok(parts.join(" "))
}
