//! Entity backends: in-process handlers or HTTP endpoints that check, store or look up
//! entity values and hand a message back to the dialogue.

mod demo;

use std::collections::HashMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Duration;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nlu::{classify_polarity, IntentIndex, PolarityLabel};

pub use demo::{register_demo_handlers, DEMO_BIRTHDAY, DEMO_EMAIL, DEMO_SSN, DEMO_ZIP};

pub const DEFAULT_BACKEND_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendRequest {
    /// Registered handler name or an `http(s)://` URL.
    pub function_ref: String,
    pub entity_name: String,
    /// Normalized value, or the whole utterance for USER_UTT entities.
    pub value: String,
    pub session_id: String,
    pub task_name: String,
    /// Every value accepted so far for the task.
    pub collected: IndexMap<String, String>,
}

impl BackendRequest {
    pub fn is_url(&self) -> bool {
        is_url(&self.function_ref)
    }

    /// JSON body for HTTP backends. Field order is fixed so the bytes are stable.
    pub fn wire_body(&self) -> String {
        #[derive(Serialize)]
        struct Wire<'a> {
            session_id: &'a str,
            task: &'a str,
            entity: &'a str,
            value: &'a str,
            collected: &'a IndexMap<String, String>,
        }
        serde_json::to_string(&Wire {
            session_id: &self.session_id,
            task: &self.task_name,
            entity: &self.entity_name,
            value: &self.value,
            collected: &self.collected,
        })
        .expect("string map serializes")
    }
}

pub fn is_url(function_ref: &str) -> bool {
    function_ref.starts_with("http://") || function_ref.starts_with("https://")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendResult {
    pub success: bool,
    /// Fills `<info>` in the entity response.
    #[serde(default)]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_echo: Option<String>,
}

impl BackendResult {
    pub fn ok() -> Self {
        Self {
            success: true,
            ..Self::default()
        }
    }

    pub fn ok_with(message: impl Into<String>) -> Self {
        Self {
            success: true,
            message: Some(message.into()),
            normalized_echo: None,
        }
    }

    pub fn fail() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("handler `{0}` is already registered")]
    DuplicateHandler(String),
    #[error("no handler registered as `{0}`")]
    UnknownHandler(String),
}

pub type Handler = Arc<dyn Fn(&BackendRequest) -> BackendResult + Send + Sync>;

/// Named handlers plus the HTTP client used for URL backends.
#[derive(Clone)]
pub struct BackendRegistry {
    handlers: HashMap<String, Handler>,
    timeout: Duration,
}

impl fmt::Debug for BackendRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<_> = self.handlers.keys().collect();
        names.sort();
        f.debug_struct("BackendRegistry")
            .field("handlers", &names)
            .field("timeout", &self.timeout)
            .finish()
    }
}

impl Default for BackendRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl BackendRegistry {
    /// No handlers at all.
    pub fn empty() -> Self {
        Self {
            handlers: HashMap::new(),
            timeout: DEFAULT_BACKEND_TIMEOUT,
        }
    }

    /// `collect_info` (accept anything) and `check_condition` (yes/no on the raw utterance).
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("collect_info", |req: &BackendRequest| BackendResult {
            success: true,
            message: None,
            normalized_echo: Some(req.value.clone()),
        })
        .expect("fresh registry");
        let polarity = IntentIndex::builtin_polarity(crate::config::DEFAULT_INTENT_THRESHOLD);
        r.register("check_condition", move |req: &BackendRequest| BackendResult {
            success: classify_polarity(&req.value, &polarity) == PolarityLabel::Positive,
            message: None,
            normalized_echo: None,
        })
        .expect("fresh registry");
        r
    }

    /// Built-ins plus the handlers the bundled example bots use.
    pub fn with_demo_handlers() -> Self {
        let mut r = Self::with_builtins();
        register_demo_handlers(&mut r).expect("demo names do not clash with built-ins");
        r
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }

    pub fn set_timeout(&mut self, timeout: Duration) {
        self.timeout = timeout;
    }

    pub fn register<F>(&mut self, name: &str, handler: F) -> Result<(), BackendError>
    where
        F: Fn(&BackendRequest) -> BackendResult + Send + Sync + 'static,
    {
        if self.handlers.contains_key(name) {
            return Err(BackendError::DuplicateHandler(name.to_string()));
        }
        self.handlers.insert(name.to_string(), Arc::new(handler));
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.handlers.contains_key(name)
    }

    pub fn names(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.handlers.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    /// Runs a backend. Only an unknown handler name is an error; panics, HTTP failures
    /// and timeouts come back as a failed result and are logged.
    pub fn dispatch(&self, req: &BackendRequest) -> Result<BackendResult, BackendError> {
        if req.is_url() {
            return Ok(self.post(req));
        }
        let handler = self
            .handlers
            .get(&req.function_ref)
            .ok_or_else(|| BackendError::UnknownHandler(req.function_ref.clone()))?;
        match catch_unwind(AssertUnwindSafe(|| handler(req))) {
            Ok(r) => Ok(r),
            Err(_) => {
                log::error!("backend handler `{}` panicked", req.function_ref);
                Ok(BackendResult::fail())
            }
        }
    }

    fn post(&self, req: &BackendRequest) -> BackendResult {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let sent = agent
            .post(&req.function_ref)
            .header("content-type", "application/json")
            .send(req.wire_body());
        let mut resp = match sent {
            Ok(r) => r,
            Err(e) => {
                log::error!("backend POST {} failed: {e}", req.function_ref);
                return BackendResult::fail();
            }
        };
        match resp.body_mut().read_json::<BackendResult>() {
            Ok(r) => r,
            Err(e) => {
                log::error!("backend {} returned an unreadable body: {e}", req.function_ref);
                BackendResult::fail()
            }
        }
    }
}
