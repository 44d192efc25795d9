// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key `{key}`: {constraint}")]
    Config { key: String, constraint: String },

    #[error("{command}: {source}")]
    Compute {
        command: &'static str,
        #[source]
        source: sqbath::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Self::Config {
            key: key.into(),
            constraint: constraint.into(),
        }
    }

    pub fn compute(command: &'static str, source: sqbath::Error) -> Self {
        Self::Compute { command, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            Self::Compute { .. } => 3,
            Self::Io { .. } => 4,
        }
    }

    /// Single-line JSON error record.
    pub fn record(&self) -> Value {
        let (kind, extra) = match self {
            Self::Config { key, constraint } => ("config", json!({ "key": key, "constraint": constraint })),
            Self::Compute { command, .. } => ("compute", json!({ "command": command })),
            Self::Io { path, .. } => ("io", json!({ "path": path })),
        };
        json!({ "error": { "kind": kind, "message": self.to_string(), "detail": extra } })
    }
}
