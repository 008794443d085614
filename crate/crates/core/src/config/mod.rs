//! Declarative bot configuration: task file, entity file, response templates and an
//! optional policy tree, compiled into an immutable [`BotConfig`].

mod loader;
mod success;
mod templates;
mod validate;

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::policy::PolicyTreeDef;

pub use loader::{compile_bot_config, load_bot_config, ConfigSources};
pub use success::{compile_success_expression, GroupOperator, SuccessExpr, SuccessExprError};
pub use templates::{ResponseTemplates, DEFAULT_TEMPLATES};
pub use validate::{validate_config, validate_config_with_actions, Issue, ValidationReport};

pub const DEFAULT_INTENT_THRESHOLD: f64 = 0.6;
pub const DEFAULT_MAX_TURNS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotMeta {
    pub bot_name: String,
    pub text_bot: bool,
}

/// A compiled bot. Immutable once loaded and safe to share across sessions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotConfig {
    pub bot_meta: BotMeta,
    /// Declaration order is preserved; it breaks intent ties.
    pub tasks: IndexMap<String, TaskDef>,
    pub entities: IndexMap<String, EntityDef>,
    pub templates: ResponseTemplates,
    pub faqs: Vec<FaqEntry>,
    pub policy: PolicyTreeDef,
    pub intent_threshold: f64,
    /// Content hash of the source documents.
    pub version: String,
    /// Non-fatal findings from validation at load time.
    pub warnings: Vec<Issue>,
}

impl BotConfig {
    pub fn task(&self, name: &str) -> Option<&TaskDef> {
        self.tasks.get(name)
    }

    /// Tasks users can ask for or reach as sub-tasks (polarity tasks excluded).
    pub fn user_tasks(&self) -> impl Iterator<Item = &TaskDef> {
        self.tasks.values().filter(|t| t.polarity().is_none())
    }

    pub fn polarity_samples(&self, polarity: Polarity) -> Vec<&str> {
        self.tasks
            .values()
            .filter(|t| t.polarity() == Some(polarity))
            .flat_map(|t| t.samples.iter().map(String::as_str))
            .collect()
    }

    pub fn entity(&self, name: &str) -> Option<&EntityDef> {
        self.entities.get(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySlotSpec {
    /// Backend handler name or URL.
    pub function: Option<String>,
    pub confirm: bool,
    pub prompt: Vec<String>,
    /// May contain `<info>`.
    pub response: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityGroup {
    pub members: Vec<String>,
    /// Filled members needed for the leaf to succeed; `None` means all of them.
    pub min_required: Option<usize>,
}

impl EntityGroup {
    pub fn required(&self) -> usize {
        self.min_required.unwrap_or(self.members.len())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinishResponse {
    pub success: Vec<String>,
    pub failure: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskDef {
    pub name: String,
    pub description: String,
    pub samples: Vec<String>,
    pub entity_specs: IndexMap<String, EntitySlotSpec>,
    pub entity_groups: IndexMap<String, EntityGroup>,
    /// Absent only for polarity tasks.
    pub success: Option<SuccessExpr>,
    pub finish_response: FinishResponse,
    pub task_finish_function: Option<String>,
    pub repeat: bool,
    pub repeat_response: Vec<String>,
    pub max_turns: u32,
}

impl TaskDef {
    /// Polarity tasks are `positive`/`negative` with description `polarity`; they feed the
    /// yes/no classifier instead of the task registry.
    pub fn polarity(&self) -> Option<Polarity> {
        if self.description != "polarity" {
            return None;
        }
        match self.name.as_str() {
            "positive" => Some(Polarity::Positive),
            "negative" => Some(Polarity::Negative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SemanticType {
    Cardinal,
    Date,
    Time,
    Email,
    Zipcode,
    Person,
    Location,
    Picklist,
    UserUtt,
}

impl SemanticType {
    pub const ALL: [SemanticType; 9] = [
        SemanticType::Cardinal,
        SemanticType::Date,
        SemanticType::Time,
        SemanticType::Email,
        SemanticType::Zipcode,
        SemanticType::Person,
        SemanticType::Location,
        SemanticType::Picklist,
        SemanticType::UserUtt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemanticType::Cardinal => "CARDINAL",
            SemanticType::Date => "DATE",
            SemanticType::Time => "TIME",
            SemanticType::Email => "EMAIL",
            SemanticType::Zipcode => "ZIPCODE",
            SemanticType::Person => "PERSON",
            SemanticType::Location => "LOCATION",
            SemanticType::Picklist => "PICKLIST",
            SemanticType::UserUtt => "USER_UTT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for SemanticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Extraction methods enabled for an entity. `ner` in config files maps to `pattern`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionMethods {
    pub pattern: bool,
    pub fuzzy_matching: Option<Vec<String>>,
    pub user_utterance: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityDef {
    pub name: String,
    /// Absent for inform-only entities that are never extracted.
    pub semantic_type: Option<SemanticType>,
    pub methods: ExtractionMethods,
    pub suggest_value: bool,
}

impl EntityDef {
    /// Human-readable label used in generic prompts ("zip_code" -> "zip code").
    pub fn label(&self) -> String {
        entity_label(&self.name)
    }
}

pub fn entity_label(name: &str) -> String {
    name.replace('_', " ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaqEntry {
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {file}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Parse {
        file: String,
        line: Option<usize>,
        message: String,
    },
    #[error("schema error in {file} at {path}: {message}")]
    Schema {
        file: String,
        path: String,
        message: String,
    },
    #[error("invalid configuration:\n{0}")]
    Invalid(ValidationReport),
}
