//! The per-invocation run manifest.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::format::{json_text, write_text};
use crate::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one command invocation. Every field except `wall_clock_seconds`
/// is a function of the inputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<String>,
    pub output_dir: String,
    pub tool_version: String,
    pub determinism: String,
    pub wall_clock_seconds: f64,
    pub exit_code: i32,
    pub files: Vec<String>,
    pub summary: Value,
}

impl RunManifest {
    pub fn new(command: &str, config: Option<&str>, output_dir: &Path) -> Self {
        RunManifest {
            command: command.into(),
            config: config.map(String::from),
            output_dir: output_dir.display().to_string(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            determinism: "no random seeds; data files are byte-identical for identical inputs".into(),
            wall_clock_seconds: 0.0,
            exit_code: 0,
            files: Vec::new(),
            summary: Value::Null,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let v = serde_json::to_value(self).expect("manifest fields are plain data");
        write_text(&dir.join(MANIFEST_FILE), &json_text(&v))
    }
}
