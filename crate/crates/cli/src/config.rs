//! `--config` files: JSON with defaults for the global sweep flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub partitions: Option<usize>,
    pub identify_negation: Option<bool>,
    /// Absolute error target for `L_d(1)`.
    pub l_target: Option<f64>,
    /// Constant `c` in the class number formula.
    pub constant: Option<f64>,
    pub max_terms: Option<u64>,
    pub cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: SweepConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if cfg.partitions == Some(0) {
            return Err(CliError::Config("partitions must be >= 1".into()));
        }
        Ok(cfg)
    }
}
