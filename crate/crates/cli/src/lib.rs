//! Library half of the `frac` command-line tool.
//!
//! The binary is a thin wrapper around [`run`]; the pieces are public so that
//! problem files can be loaded and commands driven from tests or other tools.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Cli, Command};
pub use config::{LoadedProblem, ProblemFile};
pub use error::{CliError, ExitCode};
