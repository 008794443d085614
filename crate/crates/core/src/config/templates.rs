use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

/// General responses shipped with the engine. A template file overrides any of these by name.
pub const DEFAULT_TEMPLATES: &[(&str, &str)] = &[
    ("greeting", "Hi, I am {bot_name}. What can I do for you?"),
    ("task_start", "I'd be happy to help you {task}."),
    ("subtask_start", "First, I need to {task}."),
    ("ask_entity", "What is your {entity}?"),
    ("verify_failed", "I am sorry, but I could not recognize your {entity}."),
    ("not_understood", "Sorry, I didn't catch your {entity}."),
    ("confirm_entity", "Just to confirm, your {entity} is {value}, right?"),
    (
        "disambiguate",
        "I got multiple possible answers for {entity}: {options}, which one did you mean?",
    ),
    ("suggest_values", "You can choose from: {options}."),
    ("anything_else", "Is there anything else I can help you with?"),
    ("already_done", "I have already helped you {task}."),
    ("task_done", "All done."),
    ("task_failed", "Sorry, I was not able to {task}."),
    ("repeat_offer", "Would you like to {task} again?"),
    ("fallback", "Sorry, I didn't quite get that. What can I do for you?"),
    ("goodbye", "Goodbye, have a nice day!"),
    ("apology", "Sorry, something went wrong on my side."),
];

/// Named response templates: each name maps to one or more variants.
///
/// Variants may use `{slot}` placeholders and the literal `<info>` token, which is
/// replaced by a backend message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseTemplates {
    templates: IndexMap<String, Vec<String>>,
}

impl Default for ResponseTemplates {
    fn default() -> Self {
        let templates = DEFAULT_TEMPLATES
            .iter()
            .map(|(k, v)| (k.to_string(), vec![v.to_string()]))
            .collect();
        Self { templates }
    }
}

impl ResponseTemplates {
    /// Defaults overlaid with `overrides`.
    pub fn with_overrides(overrides: IndexMap<String, Vec<String>>) -> Self {
        let mut out = Self::default();
        for (k, v) in overrides {
            out.templates.insert(k, v);
        }
        out
    }

    pub fn get(&self, name: &str) -> Option<&[String]> {
        self.templates
            .get(name)
            .map(Vec::as_slice)
            .filter(|v| !v.is_empty())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }
}
