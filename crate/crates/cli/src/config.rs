use std::path::{Path, PathBuf};

use serde::Deserialize;
use swb_core::data_model::Dimension;
use swb_core::features::{FeatureSet, WindowSpec};
use swb_core::regressors::{Algorithm, Hyperparameters};

use crate::args::DataArgs;
use crate::error::CliError;

/// `--config` file contents. Every field is optional; command-line flags
/// take precedence over anything set here.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub lexicon: Option<String>,
    pub before_days: Option<i64>,
    pub after_days: Option<i64>,
    pub active_threshold: Option<u64>,
    pub families: Option<Vec<FeatureSet>>,
    pub algorithms: Option<Vec<Algorithm>>,
    pub dimensions: Option<Vec<Dimension>>,
    pub hyperparameters: Option<Hyperparameters>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))
    }
}

/// Seed from the flag, then the config file, then `SWB_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var("SWB_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("SWB_SEED must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

/// Dataset-related settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct DataSettings {
    pub data: PathBuf,
    pub lexicon: Option<String>,
    pub window: WindowSpec,
    pub active_threshold: Option<u64>,
}

impl DataSettings {
    pub fn merge(args: &DataArgs, config: &RunConfig) -> Result<Self, CliError> {
        let data = args
            .data
            .clone()
            .or_else(|| config.data.clone())
            .ok_or_else(|| CliError::Usage("--data is required".into()))?;
        let before = args.before_days.or(config.before_days).unwrap_or(7);
        let after = args.after_days.or(config.after_days).unwrap_or(7);
        if before < 0 || after < 0 {
            return Err(CliError::Usage(
                "--before-days and --after-days must be non-negative".into(),
            ));
        }
        Ok(Self {
            data,
            lexicon: args.lexicon.clone().or_else(|| config.lexicon.clone()),
            window: WindowSpec::days(before, after),
            active_threshold: args.active_threshold.or(config.active_threshold),
        })
    }
}
