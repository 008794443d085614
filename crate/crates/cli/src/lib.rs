//! HTTP service and command-line front end for `tod-core`.

pub mod cli;
pub mod http;

pub use cli::{run, Cli, CliError};
pub use http::router;
