//! Experiment configuration, loadable from a TOML file.

use std::path::{Path, PathBuf};

use rootfind_core::centrality::RankMethod;
use rootfind_core::flows::DEFAULT_NODE_BUDGET;
use rootfind_core::growth::Model;
use serde::{Deserialize, Serialize};

use crate::error::{config_error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Finite-sample pass thresholds for the statistical checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// KS distance for the looser distribution checks.
    pub ks: f64,
    /// KS distance for the companion-variable marginals.
    pub ks_strict: f64,
    /// Minimum chi-square p-value.
    pub chi_square_p: f64,
    /// Allowed deviation of a moment estimate, in standard errors.
    pub sigmas: f64,
    /// Allowed relative deviation of the `E[(1-V)^{-1/2}]` estimate for UA.
    pub relative: f64,
    /// Allowed absolute correlation between companion variables.
    pub correlation: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { ks: 0.02, ks_strict: 0.01, chi_square_p: 0.001, sigmas: 3.0, relative: 0.01, correlation: 0.01 }
    }
}

/// Sample sizes used by the distributional suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistSizes {
    pub stick_break_samples: u64,
    pub stick_break_dims: Vec<usize>,
    pub urn_draws: u64,
    pub moment_trials: u64,
    pub moment_steps: usize,
    pub moment_dims: Vec<u32>,
    pub uniform_trials: u64,
    pub uniform_n: usize,
    pub max_moment_samples_ua: u64,
    pub max_moment_samples_regular: u64,
    pub max_moment_dims: Vec<u32>,
    pub geometric_samples: u64,
    pub rearrangement_samples: u64,
    pub rearrangement_dims: Vec<usize>,
    pub q_flow_samples: u64,
    pub q_depth: usize,
    pub q_width: usize,
}

impl Default for DistSizes {
    fn default() -> Self {
        DistSizes {
            stick_break_samples: 100_000,
            stick_break_dims: vec![2, 3, 5],
            urn_draws: 2000,
            moment_trials: 20_000,
            moment_steps: 5000,
            moment_dims: vec![2],
            uniform_trials: 10_000,
            uniform_n: 2000,
            max_moment_samples_ua: 1_000_000,
            max_moment_samples_regular: 100_000,
            max_moment_dims: (2..=10).collect(),
            geometric_samples: 100_000,
            rearrangement_samples: 100_000,
            rearrangement_dims: vec![3, 6, 10],
            q_flow_samples: 100_000,
            q_depth: 3,
            q_width: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub model: Model,
    /// Growth steps per tree.
    pub n: Vec<usize>,
    /// Output sizes of the root-finding algorithm.
    pub k: Vec<usize>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Weight (UA) or height (regular) thresholds.
    pub m: Vec<u32>,
    /// Subtree share threshold for the weight tail.
    pub epsilon: f64,
    pub method: RankMethod,
    pub trials: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Overrides the frozen `N_x` tail constant.
    pub nx_constant: Option<f64>,
    /// Word budget for flow enumeration.
    pub budget: usize,
    pub thresholds: Thresholds,
    pub dist: DistSizes,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: String::new(),
            model: Model::Ua,
            n: vec![1000],
            k: (0..=8).map(|i| 1usize << i).collect(),
            x: (1..=8).map(|i| f64::from(1u32 << i)).collect(),
            y: vec![1.0, 2.0, 4.0],
            m: vec![5, 8],
            epsilon: 0.3,
            method: RankMethod::Phi,
            trials: 1000,
            seed: 0,
            workers: None,
            out: None,
            format: Format::Csv,
            nx_constant: None,
            budget: DEFAULT_NODE_BUDGET,
            thresholds: Thresholds::default(),
            dist: DistSizes::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.trials == 0 {
            return Err(config_error("trials must be at least 1"));
        }
        for (name, empty) in [
            ("n", self.n.is_empty()),
            ("k", self.k.is_empty()),
            ("x", self.x.is_empty()),
            ("y", self.y.is_empty()),
            ("m", self.m.is_empty()),
        ] {
            if empty {
                return Err(config_error(format!("grid `{name}` must not be empty")));
            }
        }
        if self.n.contains(&0) {
            return Err(config_error("n values must be at least 1"));
        }
        if self.k.contains(&0) {
            return Err(config_error("K values must be at least 1"));
        }
        if self.m.contains(&0) {
            return Err(config_error("m values must be at least 1"));
        }
        if self.x.iter().any(|&x| !(x >= 1.0 && x.is_finite())) {
            return Err(config_error("x values must be finite and at least 1"));
        }
        if self.y.iter().any(|&y| !(y > 0.0 && y.is_finite())) {
            return Err(config_error("y values must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(config_error("epsilon must lie in (0, 1)"));
        }
        if self.workers == Some(0) {
            return Err(config_error("workers must be at least 1"));
        }
        if self.budget == 0 {
            return Err(config_error("budget must be at least 1"));
        }
        Ok(())
    }
}
