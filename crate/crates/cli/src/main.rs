mod cli;
mod commands;
mod config;
mod render;
mod report;

use std::process::ExitCode;

use clap::Parser;

use crate::cli::Cli;
use crate::config::RunConfig;
use crate::report::{CliError, Outcome, Report};

fn write_artifacts(config: &RunConfig, outcome: &Outcome) -> Result<Vec<String>, CliError> {
    let mut written = Vec::with_capacity(outcome.artifacts.len());
    for (name, contents) in &outcome.artifacts {
        let path = config.artifact_path(name);
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(&path, contents).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        written.push(path.display().to_string());
    }
    Ok(written)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let input = commands::input_json(&cli.command);
    let report = match RunConfig::load(cli.config.as_deref(), &cli.overrides()) {
        Err(e) => Report::failure(name, None, input, CliError::new("config", e.to_string())),
        Ok(config) => match commands::run(&cli.command, &config) {
            Err(e) => Report::failure(name, Some(&config), input, e),
            Ok(outcome) => match write_artifacts(&config, &outcome) {
                Ok(written) => Report::success(name, &config, input, &outcome, written),
                Err(e) => Report::failure(name, Some(&config), input, e),
            },
        },
    };
    if let Some(err) = &report.error {
        eprintln!("conealg {name}: {} error: {}", err.kind, err.message);
    }
    print!("{}", report.to_json());
    ExitCode::from(report.exit_code as u8)
}
