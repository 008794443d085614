//! Python bindings: load a bot, hold conversations, inspect the task tree.
//!
//! ```python
//! import tod
//! bot = tod.Bot.from_dir("bots/health")
//! s = tod.Session(bot)
//! s.say("I want to make an appointment")["reply"]
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyString};
use tod_core::backend::{BackendRegistry, BackendRequest, BackendResult};
use tod_core::config::{compile_bot_config, validate_config, ConfigSources};
use tod_core::store::MemoryStore;
use tod_core::tree::task_to_dot;
use tod_core::{BotConfig, Engine, SessionManager};

create_exception!(tod, ConfigError, PyException);
create_exception!(tod, DialogueError, PyException);

fn config_err(e: impl std::fmt::Display) -> PyErr {
    ConfigError::new_err(e.to_string())
}

fn dialogue_err(e: impl std::fmt::Display) -> PyErr {
    DialogueError::new_err(e.to_string())
}

/// Round-trips through the json module so callers get plain dicts and lists.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn sources(task: &Path, entity: &Path, templates: Option<&Path>, policy: Option<&Path>) -> PyResult<ConfigSources> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| config_err(format!("{}: {e}", p.display())));
    let mut s = ConfigSources::new(read(task)?, read(entity)?, "");
    s.task_name = task.display().to_string();
    s.entity_name = entity.display().to_string();
    if let Some(t) = templates {
        s.templates = read(t)?;
        s.templates_name = t.display().to_string();
    }
    if let Some(p) = policy {
        s.policy = Some(read(p)?);
        s.policy_name = p.display().to_string();
    }
    Ok(s)
}

fn dir_sources(dir: &Path) -> PyResult<ConfigSources> {
    let optional = |name: &str| Some(dir.join(name)).filter(|p| p.exists());
    sources(
        &dir.join("tasks.yaml"),
        &dir.join("entities.yaml"),
        optional("templates.yaml").as_deref(),
        optional("policy.yaml").as_deref(),
    )
}

/// A compiled, validated bot configuration plus its backend handlers.
#[pyclass(module = "tod")]
struct Bot {
    config: Arc<BotConfig>,
    backends: BackendRegistry,
}

#[pymethods]
impl Bot {
    #[new]
    #[pyo3(signature = (task_config, entity_config, templates=None, policy=None))]
    fn new(task_config: PathBuf, entity_config: PathBuf, templates: Option<PathBuf>, policy: Option<PathBuf>) -> PyResult<Self> {
        let s = sources(&task_config, &entity_config, templates.as_deref(), policy.as_deref())?;
        Self::build(&s)
    }

    /// Reads `tasks.yaml`, `entities.yaml` and, when present, `templates.yaml` and `policy.yaml`.
    #[staticmethod]
    fn from_dir(path: PathBuf) -> PyResult<Self> {
        Self::build(&dir_sources(&path)?)
    }

    #[staticmethod]
    #[pyo3(signature = (tasks, entities, templates=""))]
    fn from_yaml(tasks: &str, entities: &str, templates: &str) -> PyResult<Self> {
        Self::build(&ConfigSources::new(tasks, entities, templates))
    }

    #[getter]
    fn name(&self) -> String {
        self.config.bot_meta.bot_name.clone()
    }

    #[getter]
    fn version(&self) -> String {
        self.config.version.clone()
    }

    #[getter]
    fn tasks(&self) -> Vec<String> {
        self.config.tasks.keys().cloned().collect()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.config.warnings.iter().map(ToString::to_string).collect()
    }

    fn handlers(&self) -> Vec<String> {
        self.backends.names().into_iter().map(String::from).collect()
    }

    /// Registers a Python callable as a backend. It receives a dict with `entity`, `value`,
    /// `task`, `session_id` and `collected`, and returns a bool, a message string (success),
    /// None (failure) or a dict with `success` and `message`. Sessions created afterwards see it.
    fn register(&mut self, name: &str, handler: Py<PyAny>) -> PyResult<()> {
        let handler = Arc::new(handler);
        self.backends
            .register(name, move |req: &BackendRequest| {
                Python::attach(|py| match call_handler(py, &handler, req) {
                    Ok(r) => r,
                    Err(e) => {
                        e.print(py);
                        BackendResult::fail()
                    }
                })
            })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_dot(&self, task: &str) -> PyResult<String> {
        task_to_dot(&self.config, task).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Bot(name={:?}, tasks={})", self.config.bot_meta.bot_name, self.config.tasks.len())
    }
}

impl Bot {
    fn build(s: &ConfigSources) -> PyResult<Self> {
        let config = BotConfig::from_sources(s).map_err(config_err)?;
        Ok(Self {
            config: Arc::new(config),
            backends: BackendRegistry::with_demo_handlers(),
        })
    }
}

fn call_handler(py: Python<'_>, handler: &Py<PyAny>, req: &BackendRequest) -> PyResult<BackendResult> {
    let arg = PyDict::new(py);
    arg.set_item("entity", &req.entity_name)?;
    arg.set_item("value", &req.value)?;
    arg.set_item("task", &req.task_name)?;
    arg.set_item("session_id", &req.session_id)?;
    arg.set_item("collected", to_py(py, &req.collected)?)?;
    let out = handler.bind(py).call1((arg,))?;
    if out.is_none() {
        return Ok(BackendResult::fail());
    }
    if let Ok(ok) = out.extract::<bool>() {
        return Ok(if ok { BackendResult::ok() } else { BackendResult::fail() });
    }
    if out.is_instance_of::<PyString>() {
        return Ok(BackendResult::ok_with(out.extract::<String>()?));
    }
    let d = out.cast::<PyDict>()?;
    let success = match d.get_item("success")? {
        Some(v) => v.is_truthy()?,
        None => true,
    };
    let message = match d.get_item("message")? {
        Some(v) if !v.is_none() => Some(v.extract::<String>()?),
        _ => None,
    };
    Ok(BackendResult {
        success,
        message,
        normalized_echo: None,
    })
}

/// One conversation with an in-memory context store.
#[pyclass(module = "tod")]
struct Session {
    manager: SessionManager,
    id: String,
    #[pyo3(get)]
    greeting: String,
}

#[pymethods]
impl Session {
    /// `today` (ISO date) pins relative dates such as "tomorrow".
    #[new]
    #[pyo3(signature = (bot, today=None))]
    fn new(py: Python<'_>, bot: &Bot, today: Option<&str>) -> PyResult<Self> {
        let engine = Engine::new(bot.config.clone(), Arc::new(bot.backends.clone()));
        let mut manager = SessionManager::new(Arc::new(engine), Arc::new(MemoryStore::new()));
        if let Some(d) = today {
            let date = d.parse().map_err(|e| PyValueError::new_err(format!("bad date {d:?}: {e}")))?;
            manager = manager.with_clock(date);
        }
        let (id, greeting) = py.detach(|| manager.create_session()).map_err(dialogue_err)?;
        Ok(Self { manager, id, greeting })
    }

    #[getter]
    fn id(&self) -> &str {
        &self.id
    }

    /// Processes one user turn. Returns `reply`, `turn`, `action`, `active_task`,
    /// `finished_tasks` and `failed_tasks`.
    fn say<'py>(&self, py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
        let out = py.detach(|| self.manager.message(&self.id, text)).map_err(dialogue_err)?;
        let d = PyDict::new(py);
        d.set_item("reply", &out.reply)?;
        d.set_item("turn", out.turn)?;
        d.set_item("action", &out.action)?;
        d.set_item("active_task", &out.active_task)?;
        d.set_item("finished_tasks", &out.effect.finished_tasks)?;
        d.set_item("failed_tasks", &out.effect.failed_tasks)?;
        Ok(d)
    }

    /// The task tree snapshot served at `GET /sessions/{id}/tree`.
    fn tree<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let snap = self.manager.tree(&self.id).map_err(dialogue_err)?;
        to_py(py, &snap)
    }

    /// Full serialized dialogue context.
    fn context<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let ctx = self.manager.context(&self.id).map_err(dialogue_err)?;
        to_py(py, &ctx)
    }
}

/// Compiles a bot directory and returns `{"errors": [...], "warnings": [...]}` without raising
/// on validation findings.
#[pyfunction]
fn validate_dir<'py>(py: Python<'py>, path: PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let config = compile_bot_config(&dir_sources(&path)?).map_err(config_err)?;
    let report = validate_config(&config);
    let d = PyDict::new(py);
    d.set_item("errors", report.errors.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    d.set_item("warnings", report.warnings.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    Ok(d.into_any())
}

#[pymodule]
fn tod(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Bot>()?;
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(validate_dir, m)?)?;
    m.add("ConfigError", m.py().get_type::<ConfigError>())?;
    m.add("DialogueError", m.py().get_type::<DialogueError>())?;
    Ok(())
}
