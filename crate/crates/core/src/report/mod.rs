//! Machine-readable reports and diagram export.

pub mod dot;

use serde::Serialize;

use crate::diag::Diagnostic;

pub use dot::{goal_to_dot, value_to_dot, DotOptions};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The JSON document printed under `--json`. Field order is fixed and the
/// analysis payload uses sorted keys, so equal inputs give equal bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JsonReport {
    pub tool_version: &'static str,
    pub command: String,
    pub input_files: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
    pub analysis: serde_json::Value,
}

impl JsonReport {
    pub fn new(command: impl Into<String>, input_files: Vec<String>) -> Self {
        JsonReport {
            tool_version: TOOL_VERSION,
            command: command.into(),
            input_files,
            diagnostics: Vec::new(),
            analysis: serde_json::Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Shipped JSON schema for [`JsonReport`].
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");
