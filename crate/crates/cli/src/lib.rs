//! Command-line front end: potential spec files, tolerance profiles and JSON reports.

pub mod args;
pub mod commands;
pub mod config;
pub mod report;
pub mod spec;

pub use args::Cli;
pub use commands::{resolve, run};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(#[from] spec::SpecError),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] hardylt_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the input, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        use hardylt_core::Error as E;
        match self {
            CliError::Spec(_) | CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Core(E::Domain(_) | E::Input(_) | E::Hypothesis { .. }) => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}
