//! Command-line front end and HTTP assistant for `guesscert`.

pub mod api;
pub mod commands;
pub mod session;

pub use commands::{run, Cli};
