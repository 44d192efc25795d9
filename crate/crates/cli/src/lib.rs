// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

//! Configuration, dispatch and output for the `sqbath` command-line tool.

pub mod config;
mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, Format, RunConfig};
pub use error::CliError;
pub use output::{parse_csv, write_output, ScanResult};
pub use run::run;
