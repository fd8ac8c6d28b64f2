//! Library side of the command-line tool: argument types, command execution,
//! and the text formats. The binary in `main.rs` only maps reports and errors
//! onto the process exit code.

pub mod commands;
pub mod fmt;

pub use commands::{run, CliError, Command, Report};
