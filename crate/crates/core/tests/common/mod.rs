#![allow(dead_code)]

pub mod andor;
pub mod policy_gen;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::NaiveDate;
use tod_core::backend::BackendRegistry;
use tod_core::config::load_bot_config;
use tod_core::store::{ContextStore, MemoryStore};
use tod_core::{BotConfig, DialogueContext, Engine, SessionManager, TurnOutcome};

pub fn bots_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../bots")
}

pub fn load(bot: &str) -> BotConfig {
    let dir = bots_dir().join(bot);
    load_bot_config(
        &dir.join("tasks.yaml"),
        &dir.join("entities.yaml"),
        &dir.join("templates.yaml"),
        None,
    )
    .unwrap_or_else(|e| panic!("{bot}: {e}"))
}

pub fn engine(bot: &str) -> Engine {
    Engine::new(Arc::new(load(bot)), Arc::new(BackendRegistry::with_demo_handlers()))
}

pub fn today() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 3, 4).unwrap()
}

/// Drives a conversation turn by turn.
pub struct Chat {
    pub engine: Engine,
    pub ctx: DialogueContext,
}

impl Chat {
    pub fn new(bot: &str) -> Self {
        let engine = engine(bot);
        let ctx = engine.new_context("test", today());
        Self { engine, ctx }
    }

    pub fn say(&mut self, text: &str) -> String {
        let out = self.engine.process_turn_in_place(&mut self.ctx, text);
        out.reply
    }
}

/// One scripted exchange: what the user says and the exact reply expected.
pub type Exchange = (&'static str, &'static str);

pub struct Script {
    pub name: &'static str,
    pub bot: &'static str,
    pub greeting: &'static str,
    pub turns: Vec<Exchange>,
}

const SHOP_HELLO: &str =
    "Hi there, I am the digital assistant for Northern Trail Information Center. What can I do for you?";
const ORDER_OPEN: &str = "Oh sure, I'd be happy to help you check your order status. First, I need to pull up your account. Could you please tell me your email address?";
const VERIFIED: &str = "I have verified your identity. Please provide your order id for your order status.";
const NURSE_HELLO: &str = "Hi, I am Nurse Nancy. What can I do for you?";
const APPT_OPEN: &str =
    "I'd be happy to help you make an appointment at Nurse Nancy. What date do you prefer for the appointment?";
const BOOKED: &str = "Please wear a mask and arrive 15 minutes early for a temperature check. I have booked an appointment for you. Would you like to make another appointment?";

/// The replay suite shared by the in-memory and external-store runs.
pub fn replay_scripts() -> Vec<Script> {
    vec![
        Script {
            name: "order_status_email_verified",
            bot: "shopping",
            greeting: SHOP_HELLO,
            turns: vec![
                ("Hi, I would like to check my order status.", ORDER_OPEN),
                ("jane.doe@example.com", VERIFIED),
                ("12345", "Order 12345 has shipped and will arrive on Friday. Thanks for checking in with us. Is there anything else I can help you with?"),
            ],
        },
        Script {
            name: "order_status_zip_fallback",
            bot: "shopping",
            greeting: SHOP_HELLO,
            turns: vec![
                ("Hi, I would like to check my order status.", ORDER_OPEN),
                (
                    "I don't remember it.",
                    "I am sorry, but I could not recognize your email address. Could you please tell me your zip code?",
                ),
                ("94105", VERIFIED),
            ],
        },
        Script {
            name: "flight_weather_switch_and_faq",
            bot: "flight",
            greeting: "Hi, I am Sky Travel. What can I do for you?",
            turns: vec![
                ("I want to book a flight", "I'd be happy to help you book a flight. Where will you depart from?"),
                ("check the weather", "I'd be happy to help you check the weather. What is the zip code of your area?"),
                (
                    "94105",
                    "Here is what I found: the weather in 94105, San Francisco is sunny. That's all I have about the weather. Where will you depart from?",
                ),
                ("San Francisco", "Got it. Where is your destination?"),
                (
                    "Do I have free checked bags?",
                    "All frequent flyer program members will have one free checked bag. Where is your destination?",
                ),
                ("Los Angeles", "Got it. What day would you like to leave?"),
                ("next friday", "Your flight is booked. Is there anything else I can help you with?"),
            ],
        },
        Script {
            name: "health_insurance_branch_and_repeat",
            bot: "health",
            greeting: NURSE_HELLO,
            turns: vec![
                ("I want to make an appointment", APPT_OPEN),
                ("tomorrow", "At what time?"),
                ("3pm", "Which department do you want to make the appointment with?"),
                ("neurology", "May I have your preferred doctor name?"),
                ("Dr. John Smith", "Do you have health insurance?"),
                (
                    "yes",
                    "First, I need to get health insurance info. May I have the last four digits of your social security number?",
                ),
                ("1234", "And your birthday?"),
                ("1990-01-01", "I have found your health insurance record. Please wear a mask and arrive 15 minutes early for a temperature check. I have booked an appointment for you. Would you like to make another appointment?"),
                ("yes", APPT_OPEN),
                ("march 10", "At what time?"),
                ("at 10 am", "Which department do you want to make the appointment with?"),
                ("icu", "May I have your preferred doctor name?"),
                ("Jane Doe", "Do you have health insurance?"),
                ("yes", BOOKED),
                ("no", "Is there anything else I can help you with?"),
            ],
        },
        Script {
            name: "health_no_insurance_branch",
            bot: "health",
            greeting: NURSE_HELLO,
            turns: vec![
                ("I want to make an appointment", APPT_OPEN),
                ("march 10", "At what time?"),
                ("at 10 am", "Which department do you want to make the appointment with?"),
                ("icu", "May I have your preferred doctor name?"),
                ("Jane Doe", "Do you have health insurance?"),
                (
                    "no",
                    "Since you don't have health insurance, let me create a profile for you. What's your name?",
                ),
                ("Alice Walker", "What is your birthday?"),
                ("May 2 1985", "I have created a profile for you. Please wear a mask and arrive 15 minutes early for a temperature check. I have booked an appointment for you. Would you like to make another appointment?"),
                ("no I don't", "Is there anything else I can help you with?"),
            ],
        },
        Script {
            name: "round_trip_ambiguity",
            bot: "flight",
            greeting: "Hi, I am Sky Travel. What can I do for you?",
            turns: vec![
                (
                    "I'd like to book a round trip flight from San Francisco to Los Angeles for 2 people.",
                    "I'd be happy to help you book a flight. I got multiple possible answers for origin: San Francisco and Los Angeles, which one did you mean?",
                ),
                ("the first one", "Got it. Where is your destination?"),
            ],
        },
    ]
}

pub fn manager(bot: &str, store: Arc<dyn ContextStore>) -> SessionManager {
    SessionManager::new(Arc::new(engine(bot)), store).with_clock(today())
}

pub fn memory_manager(bot: &str) -> SessionManager {
    manager(bot, Arc::new(MemoryStore::new()))
}

/// Plays a script through a session manager. Returns the session id, the outcomes and
/// the first mismatch, if any.
pub fn play(m: &SessionManager, script: &Script) -> (String, Vec<TurnOutcome>, Result<(), String>) {
    let (id, greeting) = m.create_session().expect("create session");
    let mut check = if greeting == script.greeting {
        Ok(())
    } else {
        Err(format!("{}: greeting was {greeting:?}", script.name))
    };
    let mut outcomes = Vec::new();
    for (i, (user, want)) in script.turns.iter().enumerate() {
        let out = m.message(&id, user).expect("turn");
        if check.is_ok() && out.reply != *want {
            check = Err(format!(
                "{} turn {}: user {user:?}\n  want {want:?}\n   got {:?}",
                script.name,
                i + 1,
                out.reply
            ));
        }
        outcomes.push(out);
    }
    (id, outcomes, check)
}

/// Bot lines of a finished replay, greeting first.
pub fn transcript(greeting: &str, outcomes: &[TurnOutcome]) -> Vec<String> {
    std::iter::once(greeting.to_string())
        .chain(outcomes.iter().map(|o| o.reply.clone()))
        .collect()
}
