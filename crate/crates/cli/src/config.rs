use std::path::Path;

use qspoof_core::radar::ScenarioConfig;

use crate::{io_error, CliError, Result};

/// Parses a scenario JSON file. Unknown or missing keys are rejected by name.
pub fn load(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ScenarioConfig> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

/// Semantic checks plus the dimension budget for `n_max`. Returns warnings.
pub fn validate(cfg: &ScenarioConfig) -> Result<Vec<String>> {
    let warnings = cfg.validate()?;
    cfg.validate_budget()?;
    Ok(warnings)
}
