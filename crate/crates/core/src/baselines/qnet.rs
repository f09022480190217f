use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::argmax;
use crate::error::{Error, Result};
use crate::nn::{soft_update, standard_mlp, Adam, Head, Matrix, Mlp, INIT_STD};

/// Hyperparameters of the alternating value-based learners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairConfig {
    pub gamma: f64,
    pub tau: f64,
    pub lr: f64,
    pub eps: f64,
    pub eps_min: f64,
    pub eps_decay: f64,
    /// Lattice step of the discretized parameter head.
    pub resolution: f64,
    /// Gaussian exploration noise of a continuous parameter head.
    pub sigma_noise: f64,
    pub clip_c: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub warmup_size: usize,
    pub updates_per_epoch: usize,
    /// Updates spent on one network before switching to the other.
    pub alternation_period: u64,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            tau: 5e-3,
            lr: 1e-3,
            eps: 0.8,
            eps_min: 0.05,
            eps_decay: 1e-3,
            resolution: 5.0,
            sigma_noise: 0.2,
            clip_c: 0.5,
            batch_size: 128,
            buffer_capacity: 100_000,
            warmup_size: 5_000,
            updates_per_epoch: 1,
            alternation_period: 100,
        }
    }
}

impl PairConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::validation(format!("agent: {m}")));
        if !(0.0..=1.0).contains(&self.gamma) || !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("requires gamma in [0, 1] and tau in (0, 1]");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be > 0");
        }
        if !(0.0 <= self.eps_min && self.eps_min <= self.eps && self.eps <= 1.0 && self.eps_decay >= 0.0) {
            return bad("requires 0 <= eps_min <= eps <= 1 and eps_decay >= 0");
        }
        if !(self.resolution > 0.0 && self.sigma_noise >= 0.0 && self.clip_c >= 0.0) {
            return bad("requires resolution > 0, sigma_noise >= 0, clip_c >= 0");
        }
        if !(1 <= self.batch_size
            && self.batch_size <= self.warmup_size
            && self.warmup_size <= self.buffer_capacity)
        {
            return bad("requires 1 <= batch_size <= warmup_size <= buffer_capacity");
        }
        if self.alternation_period == 0 {
            return bad("alternation_period must be >= 1");
        }
        Ok(())
    }
}

/// Which half of an alternating pair is being trained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Discrete,
    Parameter,
}

impl Phase {
    /// Phase of update number `update` (0-based); starts with the discrete net.
    pub fn of(update: u64, period: u64) -> Self {
        if (update / period) % 2 == 0 {
            Phase::Discrete
        } else {
            Phase::Parameter
        }
    }
}

/// `r + gamma * Q_target(s', argmax_a Q_online(s', a))`.
pub fn double_q_target(reward: f64, gamma: f64, online_next: &[f64], target_next: &[f64]) -> f64 {
    reward + gamma * target_next[argmax(online_next)]
}

/// A Q-network with its slowly tracking target and optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QNet {
    pub online: Mlp,
    pub target: Mlp,
    pub opt: Adam,
}

impl QNet {
    pub fn new(input: usize, outputs: usize, lr: f64, rng: &mut ChaCha8Rng) -> Result<Self> {
        let mut online = standard_mlp(input, outputs, Head::Linear)?;
        online.xavier_init(Some(INIT_STD), rng);
        Ok(Self {
            target: online.clone(),
            opt: Adam::new(&online, lr),
            online,
        })
    }

    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        self.online.predict(x)
    }

    /// Double-Q targets for every row of `next_inputs`.
    pub fn double_targets(&self, next_inputs: &Matrix, rewards: &[f64], gamma: f64) -> Vec<f64> {
        let online = self.online.forward(next_inputs).output;
        let target = self.target.forward(next_inputs).output;
        rewards
            .iter()
            .enumerate()
            .map(|(r, &rew)| double_q_target(rew, gamma, online.row(r), target.row(r)))
            .collect()
    }

    /// One Adam step on the squared error of the taken actions' values;
    /// returns the pre-step loss.
    pub fn regress(&mut self, inputs: &Matrix, actions: &[usize], targets: &[f64]) -> Result<f64> {
        let cache = self.online.forward(inputs);
        let n = inputs.rows() as f64;
        let mut g = Matrix::zeros(inputs.rows(), self.online.output_dim());
        let mut loss = 0.0;
        for (r, (&a, &y)) in actions.iter().zip(targets).enumerate() {
            let resid = cache.output.get(r, a) - y;
            loss += resid * resid;
            g.set(r, a, 2.0 * resid / n);
        }
        let grads = self.online.backward(&cache, &g);
        self.opt.step(&mut self.online, &grads)?;
        Ok(loss / n)
    }

    pub fn track(&mut self, tau: f64) -> Result<()> {
        soft_update(&mut self.target, &self.online, tau)
    }
}

/// Rows `idx` of `m`.
pub(crate) fn take_rows(m: &Matrix, idx: &[usize]) -> Result<Matrix> {
    Matrix::from_rows(&idx.iter().map(|&r| m.row(r)).collect::<Vec<_>>())
}
