#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use tod_cli::cli::{build_engine, BotArgs};
use tod_core::store::{ContextStore, MemoryStore};
use tod_core::SessionManager;

pub fn bots_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../bots")
}

pub fn bot_args(bot: &str) -> BotArgs {
    BotArgs {
        bot_dir: Some(bots_dir().join(bot)),
        task_config: None,
        entity_config: None,
        templates: None,
        policy: None,
    }
}

pub fn manager(bot: &str, store: Arc<dyn ContextStore>) -> Arc<SessionManager> {
    let engine = build_engine(bot_args(bot).load().unwrap(), Duration::from_secs(5));
    Arc::new(SessionManager::new(Arc::new(engine), store))
}

/// Serves the router on an ephemeral port from a background runtime; returns the base URL.
pub fn spawn_server(manager: Arc<SessionManager>) -> String {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, tod_cli::router(manager)).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

pub fn memory_server(bot: &str) -> String {
    spawn_server(manager(bot, Arc::new(MemoryStore::new())))
}

/// Thin JSON client that reports every status instead of erroring on 4xx/5xx.
#[derive(Clone)]
pub struct Client {
    pub base: String,
    agent: ureq::Agent,
}

impl Client {
    pub fn new(base: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(30)))
            .build()
            .into();
        Self {
            base: base.to_string(),
            agent,
        }
    }

    fn finish<T: DeserializeOwned>(resp: Result<ureq::http::Response<ureq::Body>, ureq::Error>) -> (u16, T) {
        let mut resp = resp.expect("request");
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_json::<T>().expect("json body");
        (status, body)
    }

    pub fn create(&self) -> (u16, Value) {
        Self::finish(self.agent.post(format!("{}/sessions", self.base)).send_empty())
    }

    pub fn session(&self) -> (String, String) {
        let (status, v) = self.create();
        assert_eq!(status, 200, "{v}");
        (v["session_id"].as_str().unwrap().into(), v["greeting"].as_str().unwrap().into())
    }

    pub fn say(&self, id: &str, text: &str) -> (u16, Value) {
        Self::finish(
            self.agent
                .post(format!("{}/sessions/{id}/messages", self.base))
                .send_json(json!({ "text": text })),
        )
    }

    pub fn reply(&self, id: &str, text: &str) -> String {
        let (status, v) = self.say(id, text);
        assert_eq!(status, 200, "{v}");
        v["reply"].as_str().unwrap().to_string()
    }

    pub fn tree<T: DeserializeOwned>(&self, id: &str) -> (u16, T) {
        Self::finish(self.agent.get(format!("{}/sessions/{id}/tree", self.base)).call())
    }

    pub fn delete(&self, id: &str) -> u16 {
        let resp = self.agent.delete(format!("{}/sessions/{id}", self.base)).call().unwrap();
        resp.status().as_u16()
    }
}

pub const NURSE_HELLO: &str = "Hi, I am Nurse Nancy. What can I do for you?";
pub const APPT_OPEN: &str =
    "I'd be happy to help you make an appointment at Nurse Nancy. What date do you prefer for the appointment?";

/// Appointment without insurance, start to finish.
pub fn no_insurance_turns() -> Vec<(&'static str, &'static str)> {
    vec![
        ("I want to make an appointment", APPT_OPEN),
        ("march 10", "At what time?"),
        ("at 10 am", "Which department do you want to make the appointment with?"),
        ("icu", "May I have your preferred doctor name?"),
        ("Jane Doe", "Do you have health insurance?"),
        ("no", "Since you don't have health insurance, let me create a profile for you. What's your name?"),
        ("Alice Walker", "What is your birthday?"),
        (
            "May 2 1985",
            "I have created a profile for you. Please wear a mask and arrive 15 minutes early for a temperature check. I have booked an appointment for you. Would you like to make another appointment?",
        ),
        ("no I don't", "Is there anything else I can help you with?"),
    ]
}
