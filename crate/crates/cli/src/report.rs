//! The JSON report envelope shared by every subcommand.

use serde::Serialize;
use serde_json::Value;

use crate::config::{RunConfig, FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Affirmative,
    Negative,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Affirmative => 0,
            Verdict::Negative => 1,
            Verdict::Error => 2,
        }
    }
}

/// A failure that ends the run with exit code 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<usize>,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.to_string(),
            message: message.into(),
            offset: None,
        }
    }

    pub fn numerical(e: impl std::fmt::Display) -> Self {
        Self::new("numerical", e.to_string())
    }

    pub fn io(e: impl std::fmt::Display) -> Self {
        Self::new("io", e.to_string())
    }
}

/// Output of a successful subcommand, before it is wrapped in a [`Report`].
#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub result: Value,
    /// Set when the run completed but could not reach a verdict.
    pub error: Option<CliError>,
    /// File name and contents, written relative to the output directory.
    pub artifacts: Vec<(std::path::PathBuf, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: String,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub config: Option<RunConfig>,
    pub input: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<CliError>,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn success(
        command: &str,
        config: &RunConfig,
        input: Value,
        outcome: &Outcome,
        artifacts: Vec<String>,
    ) -> Self {
        Self {
            schema_version: FORMAT_VERSION,
            command: command.to_string(),
            verdict: outcome.verdict,
            exit_code: outcome.verdict.exit_code(),
            config: Some(config.clone()),
            input,
            result: outcome.result.clone(),
            error: outcome.error.clone(),
            artifacts,
        }
    }

    pub fn failure(command: &str, config: Option<&RunConfig>, input: Value, error: CliError) -> Self {
        Self {
            schema_version: FORMAT_VERSION,
            command: command.to_string(),
            verdict: Verdict::Error,
            exit_code: Verdict::Error.exit_code(),
            config: config.cloned(),
            input,
            result: Value::Null,
            error: Some(error),
            artifacts: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}
