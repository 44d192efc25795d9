// Copyright 2026 sqbath Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sqbath_cli::{parse_config, run, write_output, CliError, Command, Format};

/// Steady states, spectra and entropy scans for modes coupled to squeezed baths.
#[derive(Debug, Parser)]
#[command(name = "sqbath", version)]
struct Args {
    /// single-mode, two-mode, evolve, ep-scan, purity-scan or entropy-scan
    command: Command,

    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    format: Option<Format>,

    /// paper or corrected
    #[arg(long)]
    convention: Option<String>,

    /// `key=value` overrides; dotted keys reach nested tables.
    overrides: Vec<String>,
}

fn collect_overrides(args: &Args) -> Result<Vec<(String, String)>, CliError> {
    let mut out = vec![("command".to_string(), format!("\"{}\"", args.command))];
    for kv in &args.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::config(kv.clone(), "overrides have the form key=value"))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(c) = &args.convention {
        out.push(("diffusion_convention".into(), format!("\"{c}\"")));
    }
    if let Some(f) = args.format {
        let name = if f == Format::Json { "json" } else { "csv" };
        out.push(("output.format".into(), format!("\"{name}\"")));
    }
    if let Some(p) = &args.out {
        out.push(("output.path".into(), serde_json::to_string(&p.display().to_string()).unwrap()));
    }
    Ok(out)
}

fn main_inner(args: &Args) -> Result<bool, CliError> {
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    let cfg = parse_config(&text, &collect_overrides(args)?)?;
    let result = run(&cfg)?;
    let format = cfg.output.format;
    match &cfg.output.path {
        Some(p) => write_output(&result, format, p.as_ref())?,
        None => print!("{}", result.render(format)),
    }
    Ok(result.failures == 0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{}", serde_json::json!({ "error": { "kind": "flagged-rows", "message": "some rows carry failure markers; see the status column" } }));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
