//! Settings resolved from flags, `TYFIX_*` variables, a TOML file and
//! built-in defaults, in that order.

use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_MIN_FREQ: usize = 5;
pub const DEFAULT_BEAM: usize = 50;
pub const DEFAULT_MAX_TEMPLATES: usize = 20;
pub const DEFAULT_TIMEOUT_SECS: u64 = 300;

/// Keys accepted in the config file. All optional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub jobs: Option<usize>,
    pub min_freq: Option<usize>,
    pub categories: Option<String>,
    pub filler: Option<String>,
    pub beam: Option<usize>,
    pub test_cmd: Option<String>,
    pub timeout_secs: Option<u64>,
    pub max_templates: Option<usize>,
    pub context_lines: Option<usize>,
    pub holdout: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// First of flag-or-env, file, default.
pub fn pick<T>(cli: Option<T>, file: Option<T>, default: T) -> T {
    cli.or(file).unwrap_or(default)
}
