//! Scenario configuration files (TOML) and preset resolution.

use std::fs;
use std::path::Path;

use viscodelay_core::scenarios::{preset, ScenarioConfig};

use crate::{Error, Result};

/// Prefix that selects a built-in preset instead of a file, as in
/// `preset:power-source-small`.
pub const PRESET_PREFIX: &str = "preset:";

/// Parses a TOML scenario document. Unknown keys are rejected.
pub fn parse_config(text: &str, origin: &Path) -> Result<ScenarioConfig> {
    toml::from_str(text).map_err(|e| Error::parse(origin, e.message()))
}

/// Renders a scenario as TOML; [`parse_config`] reads it back unchanged.
pub fn config_to_toml(cfg: &ScenarioConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Usage(format!("cannot serialise scenario: {e}")))
}

/// Loads `source`: either a TOML file path or `preset:<name>`.
pub fn load_config(source: &str) -> Result<ScenarioConfig> {
    if let Some(name) = source.strip_prefix(PRESET_PREFIX) {
        return Ok(preset(name)?);
    }
    let path = Path::new(source);
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}
