//! Command-line pipeline and JSON service for vecticon.

pub mod commands;
pub mod config;
pub mod error;
pub mod server;
pub mod wire;

pub use commands::{run, Cli};
pub use config::RunConfig;
pub use error::CliError;
