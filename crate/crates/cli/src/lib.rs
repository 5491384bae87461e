//! Command handlers, configuration and output formatting behind the
//! `rncurves` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod parse;
pub mod suites;

use std::fmt;

/// Terminal outcome of a command that did not succeed.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Malformed or degenerate input; exit code 2.
    Input(String),
    /// A numerical pipeline failed; exit code 1.
    Numeric(String),
    /// A verification suite ran but some checks failed; exit code 1.
    ChecksFailed { failed: usize, total: usize },
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numeric(_) | Failure::ChecksFailed { .. } => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "invalid input: {m}"),
            Failure::Numeric(m) => write!(f, "numerical failure: {m}"),
            Failure::ChecksFailed { failed, total } => write!(f, "{failed} of {total} checks failed"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<rncurves_core::Error> for Failure {
    fn from(e: rncurves_core::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}
