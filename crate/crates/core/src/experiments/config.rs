use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub paths: usize,
    pub n_steps: usize,
    pub bin_width: f64,
    pub seed: u64,
    pub orders: Vec<u32>,
    pub alpha: f64,
    pub marginal_times: Vec<f64>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            paths: 20_000,
            n_steps: 16_384,
            bin_width: 1.0 / 128.0,
            seed: 42,
            orders: vec![1, 2, 3],
            alpha: 0.001,
            marginal_times: vec![0.25, 0.5, 0.75],
            output_dir: PathBuf::from("excursion-out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::invalid("paths must be positive"));
        }
        if self.n_steps < 2 {
            return Err(Error::invalid("n_steps must be at least 2"));
        }
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::invalid("bin_width must be a positive real"));
        }
        if self.orders.is_empty() || self.orders.contains(&0) {
            return Err(Error::invalid(
                "orders must be a nonempty list of integers >= 1",
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("alpha must lie in (0, 1)"));
        }
        if self.marginal_times.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::invalid(
                "marginal times must lie strictly inside (0, 1)",
            ));
        }
        Ok(())
    }
}
