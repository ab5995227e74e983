//! Library half of the `ckdyn` binary, kept separate so the commands can be
//! driven against in-memory writers.

pub mod commands;
pub mod config;

pub use commands::{cmd_check, cmd_derive, cmd_simulate, cmd_verify};
pub use config::{ConfigError, RunConfig};
