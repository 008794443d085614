//! A task-oriented dialogue engine driven by declarative bot configs.
//!
//! Tasks are and-or trees of entity groups. Each turn runs NLU, entity extraction and a
//! Policy Decision Tree that picks one of a small set of shared dialogue actions; the
//! actions walk the task tree, call entity backends and render template responses.
//!
//! ```no_run
//! use std::path::Path;
//! use std::sync::Arc;
//! use tod_core::{backend::BackendRegistry, config::load_bot_config, dialogue::Engine};
//!
//! let config = load_bot_config(
//!     Path::new("bots/health/tasks.yaml"),
//!     Path::new("bots/health/entities.yaml"),
//!     Path::new("bots/health/templates.yaml"),
//!     None,
//! )?;
//! let engine = Engine::new(Arc::new(config), Arc::new(BackendRegistry::with_demo_handlers()));
//! let mut ctx = engine.fresh_context();
//! println!("{}", engine.process_turn_in_place(&mut ctx, "I want to see a doctor").reply);
//! # Ok::<(), tod_core::config::ConfigError>(())
//! ```

pub mod backend;
pub mod config;
pub mod context;
pub mod dialogue;
pub mod entity;
pub mod nlu;
pub mod session;
pub mod store;
pub mod tree;

pub use config::{BotConfig, ConfigError};
pub use context::DialogueContext;
pub use dialogue::{Engine, TurnOutcome};
pub use session::{SessionError, SessionManager};
pub use tree::{TaskTree, TreeSnapshot};
