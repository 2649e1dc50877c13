//! Command-line front end: expression parsing, command dispatch and a
//! result cache.

pub mod cache;
pub mod commands;
pub mod expr;
pub mod report;

pub use commands::{run, Cli, Command};
