//! Library side of the `giant-atom` command-line tool: configuration
//! parsing, the subcommands and their tabular output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use serde_json::json;

pub use commands::{run, Command, GridOverride, ScenarioKind};
pub use config::{parse_config, GridSpec, OutputFormat, RawConfig, RunConfig};
pub use output::{Report, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The document does not match the schema.
    #[error("config schema error at '{path}': {reason}")]
    Schema { path: String, reason: String },

    /// A field has a value the physics does not allow.
    #[error("invalid config field '{field}': {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Core(#[from] giant_atom::Error),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A consistency check ran but did not meet its tolerance.
    #[error("check failed: {0}")]
    Check(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema { .. } => "schema",
            CliError::Config { .. } => "config",
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Check(_) => "check",
            CliError::Usage(_) => "usage",
        }
    }

    /// Process exit status: 2 for bad input, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::Core(giant_atom::Error::Invalid { .. }) => 2,
            _ => 1,
        }
    }

    /// Single-line JSON error record.
    pub fn record(&self) -> String {
        let mut err = json!({
            "kind": self.kind(),
            "message": self.to_string(),
        });
        match self {
            CliError::Schema { path, .. } => err["path"] = json!(path),
            CliError::Config { field, .. } => err["field"] = json!(field),
            CliError::Core(giant_atom::Error::Invalid { field, .. }) => err["field"] = json!(field),
            _ => {}
        }
        json!({ "error": err }).to_string()
    }
}
