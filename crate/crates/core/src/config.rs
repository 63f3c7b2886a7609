use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunable constants of the pipeline. Serialized with the field names of the
/// JSON config file: `gamma`, `c`, `alpha`, `seed`, `budget_K`, `d_min`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoConfig {
    /// Good/bad classification constant.
    #[serde(default = "defaults::gamma")]
    pub gamma: f64,
    /// Set-aside threshold constant for heavy same-bucket neighbors.
    #[serde(rename = "c", default = "defaults::one")]
    pub c_setaside: f64,
    /// Target maximum-degree exponent, `0 < alpha < 1/8`.
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    /// Smallest degree the lemma checks look at.
    #[serde(default = "defaults::d_min")]
    pub d_min: usize,
    #[serde(default)]
    pub seed: u64,
    /// Gathered subgraphs above `budget_k * n` edges are reported as budget diagnostics.
    #[serde(rename = "budget_K", default = "defaults::budget")]
    pub budget_k: f64,
}

mod defaults {
    pub fn gamma() -> f64 {
        1.0
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn alpha() -> f64 {
        0.1
    }
    pub fn d_min() -> usize {
        2
    }
    pub fn budget() -> f64 {
        8.0
    }
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            gamma: defaults::gamma(),
            c_setaside: defaults::one(),
            alpha: defaults::alpha(),
            d_min: defaults::d_min(),
            seed: 0,
            budget_k: defaults::budget(),
        }
    }
}

impl AlgoConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.c_setaside > 0.0 && self.c_setaside.is_finite()) {
            return bad(format!("c must be positive, got {}", self.c_setaside));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.125) {
            return bad(format!("alpha must lie in (0, 1/8), got {}", self.alpha));
        }
        if !(self.budget_k > 0.0 && self.budget_k.is_finite()) {
            return bad(format!("budget_K must be positive, got {}", self.budget_k));
        }
        if self.d_min < 2 {
            return bad(format!("d_min must be at least 2, got {}", self.d_min));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: AlgoConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}
