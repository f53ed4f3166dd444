use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::KernelConfig;
use crate::manifold::Manifold;

/// Largest N for which dense weight storage is allowed.
pub const DENSE_LIMIT: usize = 4096;

/// Truncation used in sparse mode when the spec does not set one.
pub const DEFAULT_SPARSE_TAU: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    #[default]
    Dense,
    Sparse,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    #[default]
    Random,
    Grid,
}

/// Summary statistic over vertices of the absolute error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    #[default]
    Median,
    Mean,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StorageMode {
    Dense,
    Sparse { tau: f64 },
}

impl StorageMode {
    pub fn kernel(self, epsilon: f64) -> Result<KernelConfig> {
        match self {
            StorageMode::Dense => KernelConfig::dense(epsilon),
            StorageMode::Sparse { tau } => KernelConfig::new(epsilon, tau),
        }
    }

    pub fn tau(self) -> f64 {
        match self {
            StorageMode::Dense => 0.0,
            StorageMode::Sparse { tau } => tau,
        }
    }
}

/// Declarative sweep over `(N, ε, trial)`.
///
/// JSON schema:
///
/// ```json
/// {
///   "manifold": "circle",            // circle | sphere | torus
///   "function": "sin_theta",         // see `list-functions`
///   "N_list": [500, 1000],
///   "epsilon_list": [0.01, 0.005],
///   "trials": 5,
///   "master_seed": 42,
///   "mode": "dense",                 // dense | sparse (optional, default dense)
///   "tau": 1e-8,                     // sparse truncation (optional)
///   "interior_statistic": "median",  // median | mean | max (optional)
///   "sampling": "random",            // random | grid (optional)
///   "anchor": false                  // pin vertex 0 at a fixed point (optional)
/// }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub manifold: String,
    pub function: String,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub epsilon_list: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub mode: ModeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default)]
    pub interior_statistic: Statistic,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub anchor: bool,
}

/// A validated spec with registry lookups done.
#[derive(Clone, Copy, Debug)]
pub struct ResolvedSpec {
    pub manifold: Manifold,
    pub function: &'static str,
    pub storage: StorageMode,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<ResolvedSpec> {
        let manifold = Manifold::from_id(&self.manifold)?;
        let function = manifold.function(&self.function)?.id;
        if self.n_list.is_empty() || self.epsilon_list.is_empty() {
            return Err(Error::InvalidSpec("N_list and epsilon_list must be non-empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be >= 1".into()));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidSpec(format!("N = {n} is below the minimum of 2")));
        }
        for &eps in &self.epsilon_list {
            KernelConfig::dense(eps)?;
        }
        let storage = match self.mode {
            ModeKind::Dense => {
                if self.tau.is_some_and(|t| t != 0.0) {
                    return Err(Error::InvalidSpec("tau > 0 requires mode = sparse".into()));
                }
                if let Some(&n) = self.n_list.iter().find(|&&n| n > DENSE_LIMIT) {
                    return Err(Error::InvalidSpec(format!(
                        "N = {n} exceeds the dense limit of {DENSE_LIMIT}; use mode = sparse with tau > 0"
                    )));
                }
                StorageMode::Dense
            }
            ModeKind::Sparse => {
                let tau = self.tau.unwrap_or(DEFAULT_SPARSE_TAU);
                if !(tau > 0.0 && tau < 1.0) {
                    return Err(Error::InvalidSpec(format!("sparse mode needs 0 < tau < 1, got {tau}")));
                }
                StorageMode::Sparse { tau }
            }
        };
        Ok(ResolvedSpec {
            manifold,
            function,
            storage,
        })
    }

    /// Label written to the `mode` column.
    pub fn mode_label(&self) -> String {
        let base = match self.validate().map(|r| r.storage) {
            Ok(StorageMode::Sparse { tau }) => format!("sparse({tau:e})"),
            _ => "dense".to_string(),
        };
        match self.sampling {
            Sampling::Random => base,
            Sampling::Grid => format!("{base}+grid"),
        }
    }
}
