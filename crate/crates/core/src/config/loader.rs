use std::path::Path;

use indexmap::IndexMap;
use serde_yaml::{Mapping, Value};
use sha2::{Digest, Sha256};

use super::success::value_kind;
use super::*;

/// Raw text of the configuration documents plus the names used in error messages.
#[derive(Debug, Clone)]
pub struct ConfigSources {
    pub task: String,
    pub entity: String,
    pub templates: String,
    pub policy: Option<String>,
    pub task_name: String,
    pub entity_name: String,
    pub templates_name: String,
    pub policy_name: String,
}

impl ConfigSources {
    pub fn new(task: impl Into<String>, entity: impl Into<String>, templates: impl Into<String>) -> Self {
        Self {
            task: task.into(),
            entity: entity.into(),
            templates: templates.into(),
            policy: None,
            task_name: "task config".into(),
            entity_name: "entity config".into(),
            templates_name: "templates".into(),
            policy_name: "policy".into(),
        }
    }

    pub fn with_policy(mut self, policy: impl Into<String>) -> Self {
        self.policy = Some(policy.into());
        self
    }

    pub fn from_paths(
        task: &Path,
        entity: &Path,
        templates: &Path,
        policy: Option<&Path>,
    ) -> Result<Self, ConfigError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        Ok(Self {
            task: read(task)?,
            entity: read(entity)?,
            templates: read(templates)?,
            policy: policy.map(read).transpose()?,
            task_name: task.display().to_string(),
            entity_name: entity.display().to_string(),
            templates_name: templates.display().to_string(),
            policy_name: policy
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "policy".into()),
        })
    }

    fn digest(&self) -> String {
        let mut h = Sha256::new();
        for part in [
            self.task.as_str(),
            self.entity.as_str(),
            self.templates.as_str(),
            self.policy.as_deref().unwrap_or(""),
        ] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reads, compiles and validates the four configuration files. Fails when validation
/// reports any error; warnings are kept on the returned config.
pub fn load_bot_config(
    task_file: &Path,
    entity_file: &Path,
    template_file: &Path,
    policy_file: Option<&Path>,
) -> Result<BotConfig, ConfigError> {
    let sources = ConfigSources::from_paths(task_file, entity_file, template_file, policy_file)?;
    BotConfig::from_sources(&sources)
}

impl BotConfig {
    pub fn from_sources(sources: &ConfigSources) -> Result<BotConfig, ConfigError> {
        let mut config = compile_bot_config(sources)?;
        let report = validate_config(&config);
        if !report.is_valid() {
            return Err(ConfigError::Invalid(report));
        }
        config.warnings = report.warnings;
        Ok(config)
    }
}

/// Parses and compiles without referential validation. Use [`validate_config`] on the result.
pub fn compile_bot_config(sources: &ConfigSources) -> Result<BotConfig, ConfigError> {
    let task_doc = Doc::new(&sources.task_name);
    let task_root = task_doc.parse(&sources.task)?;
    let (bot_meta, intent_threshold, tasks, faqs) = task_doc.task_file(&task_root)?;

    let entity_doc = Doc::new(&sources.entity_name);
    let entity_root = entity_doc.parse(&sources.entity)?;
    let entities = entity_doc.entity_file(&entity_root)?;

    let tpl_doc = Doc::new(&sources.templates_name);
    let tpl_root = tpl_doc.parse(&sources.templates)?;
    let templates = tpl_doc.template_file(&tpl_root)?;

    let policy = match &sources.policy {
        Some(text) => {
            let doc = Doc::new(&sources.policy_name);
            let root = doc.parse(text)?;
            PolicyTreeDef::from_value(&root).map_err(|e| doc.schema(&e.path, e.message))?
        }
        None => PolicyTreeDef::default_tree(),
    };

    Ok(BotConfig {
        bot_meta,
        tasks,
        entities,
        templates,
        faqs,
        policy,
        intent_threshold,
        version: sources.digest(),
        warnings: Vec::new(),
    })
}

struct Doc<'a> {
    file: &'a str,
}

type TaskFile = (BotMeta, f64, IndexMap<String, TaskDef>, Vec<FaqEntry>);

impl<'a> Doc<'a> {
    fn new(file: &'a str) -> Self {
        Self { file }
    }

    fn parse(&self, text: &str) -> Result<Value, ConfigError> {
        serde_yaml::from_str::<Value>(text).map_err(|e| ConfigError::Parse {
            file: self.file.to_string(),
            line: e.location().map(|l| l.line()),
            message: e.to_string(),
        })
    }

    fn schema(&self, path: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Schema {
            file: self.file.to_string(),
            path: path.to_string(),
            message: message.into(),
        }
    }

    fn map<'v>(&self, v: &'v Value, path: &str) -> Result<&'v Mapping, ConfigError> {
        v.as_mapping()
            .ok_or_else(|| self.schema(path, format!("expected a mapping, found {}", value_kind(v))))
    }

    /// A mapping, where an empty (null) value counts as an empty mapping.
    fn map_or_empty<'v>(&self, v: Option<&'v Value>, path: &str) -> Result<Option<&'v Mapping>, ConfigError> {
        match v {
            None | Some(Value::Null) => Ok(None),
            Some(v) => self.map(v, path).map(Some),
        }
    }

    fn entries<'v>(&self, m: &'v Mapping, path: &str) -> Result<Vec<(String, &'v Value)>, ConfigError> {
        m.iter()
            .map(|(k, v)| match k {
                Value::String(s) => Ok((s.clone(), v)),
                Value::Bool(b) => Ok((b.to_string(), v)),
                Value::Number(n) => Ok((n.to_string(), v)),
                other => Err(self.schema(path, format!("keys must be strings, found {}", value_kind(other)))),
            })
            .collect()
    }

    fn check_keys(&self, m: &Mapping, allowed: &[&str], path: &str) -> Result<(), ConfigError> {
        for (key, _) in self.entries(m, path)? {
            if !allowed.contains(&key.as_str()) {
                return Err(self.schema(
                    &join(path, &key),
                    format!("unknown key `{key}` (allowed: {})", allowed.join(", ")),
                ));
            }
        }
        Ok(())
    }

    fn scalar(&self, v: &Value, path: &str) -> Result<String, ConfigError> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            Value::Bool(b) => Ok(b.to_string()),
            other => Err(self.schema(path, format!("expected text, found {}", value_kind(other)))),
        }
    }

    fn opt_scalar(&self, v: Option<&Value>, path: &str) -> Result<Option<String>, ConfigError> {
        match v {
            None | Some(Value::Null) => Ok(None),
            Some(v) => self.scalar(v, path).map(Some),
        }
    }

    /// Null means empty; a lone scalar is a one-element list.
    fn string_list(&self, v: Option<&Value>, path: &str) -> Result<Vec<String>, ConfigError> {
        match v {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(Value::Sequence(items)) => items
                .iter()
                .enumerate()
                .map(|(i, item)| self.scalar(item, &format!("{path}[{i}]")))
                .collect(),
            Some(other) => Ok(vec![self.scalar(other, path)?]),
        }
    }

    /// Accepts booleans and yes/no style words; empty means no.
    fn flag(&self, v: Option<&Value>, path: &str) -> Result<bool, ConfigError> {
        match v {
            None | Some(Value::Null) => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(Value::String(s)) => match s.trim().to_ascii_lowercase().as_str() {
                "yes" | "y" | "true" | "on" => Ok(true),
                "no" | "n" | "false" | "off" | "" => Ok(false),
                other => Err(self.schema(path, format!("expected yes/no, found `{other}`"))),
            },
            Some(other) => Err(self.schema(path, format!("expected yes/no, found {}", value_kind(other)))),
        }
    }

    fn task_file(&self, root: &Value) -> Result<TaskFile, ConfigError> {
        let root = self.map(root, "")?;
        self.check_keys(root, &["Bot", "Task", "FAQ"], "")?;

        let mut bot_meta = BotMeta {
            bot_name: "assistant".into(),
            text_bot: true,
        };
        let mut threshold = DEFAULT_INTENT_THRESHOLD;
        if let Some(bot) = self.map_or_empty(root.get("Bot"), "Bot")? {
            self.check_keys(bot, &["bot_name", "text_bot", "intent_threshold"], "Bot")?;
            if let Some(name) = self.opt_scalar(bot.get("bot_name"), "Bot.bot_name")? {
                bot_meta.bot_name = name;
            }
            if bot.contains_key("text_bot") {
                bot_meta.text_bot = self.flag(bot.get("text_bot"), "Bot.text_bot")?;
            }
            if let Some(v) = bot.get("intent_threshold") {
                threshold = v.as_f64().ok_or_else(|| {
                    self.schema("Bot.intent_threshold", format!("expected a number, found {}", value_kind(v)))
                })?;
            }
        }

        let mut tasks = IndexMap::new();
        if let Some(section) = self.map_or_empty(root.get("Task"), "Task")? {
            for (name, body) in self.entries(section, "Task")? {
                let path = join("Task", &name);
                let task = self.task(&name, body, &path)?;
                tasks.insert(name, task);
            }
        }

        let mut faqs = Vec::new();
        match root.get("FAQ") {
            None | Some(Value::Null) => {}
            Some(Value::Sequence(items)) => {
                for (i, item) in items.iter().enumerate() {
                    let path = format!("FAQ[{i}]");
                    let m = self.map(item, &path)?;
                    self.check_keys(m, &["question", "answer"], &path)?;
                    faqs.push(FaqEntry {
                        question: self.opt_scalar(m.get("question"), &join(&path, "question"))?.unwrap_or_default(),
                        answer: self.opt_scalar(m.get("answer"), &join(&path, "answer"))?.unwrap_or_default(),
                    });
                }
            }
            Some(other) => {
                return Err(self.schema("FAQ", format!("expected a list of question/answer pairs, found {}", value_kind(other))))
            }
        }

        Ok((bot_meta, threshold, tasks, faqs))
    }

    fn task(&self, name: &str, body: &Value, path: &str) -> Result<TaskDef, ConfigError> {
        const KEYS: &[&str] = &[
            "description",
            "samples",
            "entities",
            "entity_groups",
            "success",
            "finish_response",
            "task_finish_function",
            "repeat",
            "repeat_response",
            "max_turns",
        ];
        let m = self.map(body, path)?;
        self.check_keys(m, KEYS, path)?;

        let description = self
            .opt_scalar(m.get("description"), &join(path, "description"))?
            .unwrap_or_else(|| entity_label(name));

        let mut entity_specs = IndexMap::new();
        let ents_path = join(path, "entities");
        if let Some(ents) = self.map_or_empty(m.get("entities"), &ents_path)? {
            for (ename, spec) in self.entries(ents, &ents_path)? {
                let spath = join(&ents_path, &ename);
                let spec = match spec {
                    Value::Null => EntitySlotSpec {
                        function: None,
                        confirm: false,
                        prompt: Vec::new(),
                        response: Vec::new(),
                    },
                    other => {
                        let sm = self.map(other, &spath)?;
                        self.check_keys(sm, &["function", "confirm", "prompt", "response"], &spath)?;
                        EntitySlotSpec {
                            function: self.opt_scalar(sm.get("function"), &join(&spath, "function"))?,
                            confirm: self.flag(sm.get("confirm"), &join(&spath, "confirm"))?,
                            prompt: self.string_list(sm.get("prompt"), &join(&spath, "prompt"))?,
                            response: self.string_list(sm.get("response"), &join(&spath, "response"))?,
                        }
                    }
                };
                entity_specs.insert(ename, spec);
            }
        }

        let mut entity_groups = IndexMap::new();
        let groups_path = join(path, "entity_groups");
        if let Some(groups) = self.map_or_empty(m.get("entity_groups"), &groups_path)? {
            for (gname, g) in self.entries(groups, &groups_path)? {
                let gpath = join(&groups_path, &gname);
                let group = match g {
                    Value::Mapping(gm) => {
                        self.check_keys(gm, &["members", "min_required"], &gpath)?;
                        let min_required = match gm.get("min_required") {
                            None | Some(Value::Null) => None,
                            Some(v) => Some(v.as_u64().ok_or_else(|| {
                                self.schema(&join(&gpath, "min_required"), "expected a non-negative integer")
                            })? as usize),
                        };
                        EntityGroup {
                            members: self.string_list(gm.get("members"), &join(&gpath, "members"))?,
                            min_required,
                        }
                    }
                    other => EntityGroup {
                        members: self.string_list(Some(other), &gpath)?,
                        min_required: None,
                    },
                };
                entity_groups.insert(gname, group);
            }
        }

        let success = match m.get("success") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                compile_success_expression(v)
                    .map_err(|e| self.schema(&join(path, "success"), e.to_string()))?
                    .normalized(),
            ),
        };

        let mut finish_response = FinishResponse::default();
        let fpath = join(path, "finish_response");
        if let Some(fr) = self.map_or_empty(m.get("finish_response"), &fpath)? {
            self.check_keys(fr, &["success", "failure"], &fpath)?;
            finish_response.success = self.string_list(fr.get("success"), &join(&fpath, "success"))?;
            finish_response.failure = self.string_list(fr.get("failure"), &join(&fpath, "failure"))?;
        }

        let max_turns = match m.get("max_turns") {
            None | Some(Value::Null) => DEFAULT_MAX_TURNS,
            Some(v) => {
                let n = v.as_i64().ok_or_else(|| {
                    self.schema(&join(path, "max_turns"), format!("expected an integer, found {}", value_kind(v)))
                })?;
                u32::try_from(n.max(0)).unwrap_or(u32::MAX)
            }
        };

        Ok(TaskDef {
            name: name.to_string(),
            description,
            samples: self.string_list(m.get("samples"), &join(path, "samples"))?,
            entity_specs,
            entity_groups,
            success,
            finish_response,
            task_finish_function: self.opt_scalar(m.get("task_finish_function"), &join(path, "task_finish_function"))?,
            repeat: self.flag(m.get("repeat"), &join(path, "repeat"))?,
            repeat_response: self.string_list(m.get("repeat_response"), &join(path, "repeat_response"))?,
            max_turns,
        })
    }

    fn entity_file(&self, root: &Value) -> Result<IndexMap<String, EntityDef>, ConfigError> {
        let root = self.map(root, "")?;
        self.check_keys(root, &["Entity"], "")?;
        let mut out = IndexMap::new();
        let Some(section) = self.map_or_empty(root.get("Entity"), "Entity")? else {
            return Ok(out);
        };
        for (name, body) in self.entries(section, "Entity")? {
            let path = join("Entity", &name);
            let def = match body {
                Value::Null => EntityDef {
                    name: name.clone(),
                    semantic_type: None,
                    methods: ExtractionMethods::default(),
                    suggest_value: false,
                },
                other => {
                    let m = self.map(other, &path)?;
                    self.check_keys(m, &["type", "methods", "suggest_value"], &path)?;
                    let semantic_type = match self.opt_scalar(m.get("type"), &join(&path, "type"))? {
                        None => None,
                        Some(t) => Some(SemanticType::parse(&t).ok_or_else(|| {
                            self.schema(&join(&path, "type"), format!("unknown entity type `{t}`"))
                        })?),
                    };
                    let mut methods = ExtractionMethods::default();
                    let mpath = join(&path, "methods");
                    if let Some(mm) = self.map_or_empty(m.get("methods"), &mpath)? {
                        self.check_keys(mm, &["ner", "pattern", "fuzzy_matching", "user_utterance"], &mpath)?;
                        methods.pattern = mm.contains_key("ner") || mm.contains_key("pattern");
                        methods.user_utterance = mm.contains_key("user_utterance");
                        if mm.contains_key("fuzzy_matching") {
                            methods.fuzzy_matching =
                                Some(self.string_list(mm.get("fuzzy_matching"), &join(&mpath, "fuzzy_matching"))?);
                        }
                    }
                    EntityDef {
                        name: name.clone(),
                        semantic_type,
                        methods,
                        suggest_value: self.flag(m.get("suggest_value"), &join(&path, "suggest_value"))?,
                    }
                }
            };
            out.insert(name, def);
        }
        Ok(out)
    }

    fn template_file(&self, root: &Value) -> Result<ResponseTemplates, ConfigError> {
        let mut overrides = IndexMap::new();
        if let Some(m) = self.map_or_empty(Some(root), "")? {
            for (name, v) in self.entries(m, "")? {
                overrides.insert(name.clone(), self.string_list(Some(v), &name)?);
            }
        }
        Ok(ResponseTemplates::with_overrides(overrides))
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}
