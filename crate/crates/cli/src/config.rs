use std::path::{Path, PathBuf};

use pinn::{Backend, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_GRID: usize = 101;
pub const DEFAULT_N_TERMS: usize = 200;

/// Run configuration as read from `--config` and echoed to `config.json`.
///
/// Keys missing from the file take the defaults below; unknown keys are
/// rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: Backend,
    pub steps: usize,
    pub learning_rate: f64,
    pub alpha: f64,
    pub n_interior: usize,
    pub per_side: usize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub log_every: usize,
    pub deterministic: bool,
    pub out: PathBuf,
    pub grid: usize,
    pub n_terms: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        RunConfig {
            backend: t.backend,
            steps: t.steps,
            learning_rate: t.learning_rate,
            alpha: t.alpha,
            n_interior: t.n_interior,
            per_side: t.per_side,
            seed: t.seed,
            adam_beta1: t.adam_beta1,
            adam_beta2: t.adam_beta2,
            adam_epsilon: t.adam_epsilon,
            log_every: t.log_every,
            deterministic: t.deterministic,
            out: PathBuf::from("out"),
            grid: DEFAULT_GRID,
            n_terms: DEFAULT_N_TERMS,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            backend: self.backend,
            steps: self.steps,
            learning_rate: self.learning_rate,
            alpha: self.alpha,
            n_interior: self.n_interior,
            per_side: self.per_side,
            seed: self.seed,
            adam_beta1: self.adam_beta1,
            adam_beta2: self.adam_beta2,
            adam_epsilon: self.adam_epsilon,
            log_every: self.log_every,
            deterministic: self.deterministic,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.train_config().validate()?;
        if self.grid < 2 {
            return Err(CliError::Input(format!("grid must be at least 2, got {}", self.grid)));
        }
        if self.n_terms == 0 {
            return Err(CliError::Input("n_terms must be at least 1".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
