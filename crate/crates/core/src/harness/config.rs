use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agent::PatConfig;
use crate::baselines::PairConfig;
use crate::error::{Error, Result};
use crate::sim::{CostParams, EnvConfig, PoolConfig, TrafficConfig, VnfSpec};

/// The shipped reference document.
pub const DEFAULTS_TOML: &str = include_str!("defaults.toml");

/// Environment variable consulted when no seed is given explicitly.
pub const SEED_ENV: &str = "VNF_LAB_SEED";

/// Normalization of the per-decision training cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardConfig {
    /// Weight of the network-wide term.
    pub beta: f64,
    /// Cost magnitude mapped to the edge of `[-1, 1]`.
    pub gamma_max: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            beta: 0.2,
            gamma_max: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AgentConfig {
    Pat(PatConfig),
    Greedy,
    Cloud,
    Random,
    Ddqn(PairConfig),
    Ddpg(PairConfig),
}

impl AgentConfig {
    pub const NAMES: [&'static str; 6] = ["pat", "greedy", "cloud", "random", "ddqn", "ddpg"];

    pub fn name(&self) -> &'static str {
        match self {
            AgentConfig::Pat(_) => "pat",
            AgentConfig::Greedy => "greedy",
            AgentConfig::Cloud => "cloud",
            AgentConfig::Random => "random",
            AgentConfig::Ddqn(_) => "ddqn",
            AgentConfig::Ddpg(_) => "ddpg",
        }
    }

    /// Default settings of the agent called `name`.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "pat" => AgentConfig::Pat(PatConfig::default()),
            "greedy" => AgentConfig::Greedy,
            "cloud" => AgentConfig::Cloud,
            "random" => AgentConfig::Random,
            "ddqn" => AgentConfig::Ddqn(PairConfig::default()),
            "ddpg" => AgentConfig::Ddpg(PairConfig::default()),
            other => {
                return Err(Error::validation(format!(
                    "unknown agent `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn is_learner(&self) -> bool {
        matches!(self, AgentConfig::Pat(_) | AgentConfig::Ddqn(_) | AgentConfig::Ddpg(_))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AgentConfig::Pat(c) => c.validate(),
            AgentConfig::Ddqn(c) | AgentConfig::Ddpg(c) => c.validate(),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub total_epochs: u64,
    pub eval_epochs: u64,
    /// Write every n-th training epoch to the metrics file.
    pub metrics_every: u64,
    /// Trailing window (epochs) used for the smoothed summary figures.
    pub smoothing_window: u64,
    pub checkpoint_path: Option<PathBuf>,
    /// Also persist the per-epoch allocation snapshots.
    pub snapshots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: None,
            total_epochs: 20_000,
            eval_epochs: 200,
            metrics_every: 1,
            smoothing_window: 100,
            checkpoint_path: None,
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pool: PoolConfig,
    pub vnfs: Vec<VnfSpec>,
    pub costs: CostParams,
    #[serde(default)]
    pub traffic: TrafficConfig,
    #[serde(default)]
    pub reward: RewardConfig,
    pub agent: AgentConfig,
    #[serde(default)]
    pub run: RunConfig,
}

impl ExperimentConfig {
    pub fn defaults() -> Self {
        load_config_str(DEFAULTS_TOML).expect("shipped defaults are valid")
    }

    pub fn env_config(&self) -> EnvConfig {
        EnvConfig {
            pool: self.pool.clone(),
            vnfs: self.vnfs.clone(),
            costs: self.costs.clone(),
            traffic: self.traffic.clone(),
            beta: self.reward.beta,
            gamma_max: self.reward.gamma_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.vnfs.is_empty() {
            return Err(Error::validation("vnfs must not be empty"));
        }
        self.env_config().validate()?;
        let r = &self.reward;
        if !(r.beta.is_finite() && r.beta >= 0.0 && r.gamma_max.is_finite() && r.gamma_max > 0.0) {
            return Err(Error::validation("reward: requires beta >= 0 and gamma_max > 0"));
        }
        self.agent.validate()?;
        if self.run.total_epochs < 1 {
            return Err(Error::validation("run.total_epochs must be >= 1"));
        }
        if self.run.metrics_every < 1 || self.run.smoothing_window < 1 {
            return Err(Error::validation("run.metrics_every and run.smoothing_window must be >= 1"));
        }
        Ok(())
    }

    /// True when both configurations describe the same network and traffic.
    pub fn same_scenario(&self, other: &Self) -> bool {
        self.pool == other.pool
            && self.vnfs == other.vnfs
            && self.costs == other.costs
            && self.traffic == other.traffic
            && self.reward == other.reward
    }

    /// Keeps the first `k` servers and the first `n` VNF profiles.
    pub fn shrink(mut self, k: usize, n: usize) -> Result<Self> {
        if n > self.vnfs.len() {
            return Err(Error::validation(format!("cannot keep {n} of {} vnfs", self.vnfs.len())));
        }
        self.pool.k_servers = k;
        self.pool.n_vnfs = n;
        self.vnfs.truncate(n);
        self.validate()?;
        Ok(self)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::validation(e.to_string()))
    }
}

/// Parses and validates a configuration document. Schema errors name the
/// offending path.
pub fn load_config_str(text: &str) -> Result<ExperimentConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::Schema {
        path: String::new(),
        message: e.to_string(),
    })?;
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().message().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_config_str(&text)
}

/// Seed precedence: explicit value, then the document, then
/// [`SEED_ENV`], then zero.
pub fn resolve_seed(explicit: Option<u64>, document: Option<u64>) -> Result<u64> {
    if let Some(s) = explicit.or(document) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::validation(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}
