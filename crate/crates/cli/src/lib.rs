//! Experiment harness for the `anyonwalk` engines.
//!
//! A run reads one TOML file, validates it against the schema of its
//! experiment kind, writes a manifest, computes, and leaves CSV tables, a
//! JSON summary and optional SVG plots next to the finalised manifest.

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

use std::fmt;

pub use config::{parse, Kind, Overrides, RunConfig};
pub use run::{run, RunReport};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const GUARD: i32 = 3;
    pub const INVARIANT: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Engine(anyonwalk::Error),
    Io(String),
    /// One or more verification checks failed.
    Verify(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => exit::SCHEMA,
            CliError::Engine(e) if e.is_guard() => exit::GUARD,
            CliError::Engine(e) if e.is_invariant_breach() => exit::INVARIANT,
            CliError::Engine(_) => exit::SCHEMA,
            CliError::Io(_) => exit::IO,
            CliError::Verify(_) => exit::INVARIANT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "config error: {m}"),
            CliError::Engine(e) if e.is_guard() => write!(f, "guard limit: {e}"),
            CliError::Engine(e) if e.is_invariant_breach() => write!(f, "numerical invariant breached: {e}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Verify(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<anyonwalk::Error> for CliError {
    fn from(e: anyonwalk::Error) -> Self {
        CliError::Engine(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
