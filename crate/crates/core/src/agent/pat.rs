//! Parameterized-action twin-critic learner.
//!
//! A discrete actor scores the `K + 1` placements, a parameter actor maps the
//! state and the chosen placement to CPU/memory deltas through a scaled tanh,
//! and two critics estimate `Q(s, a, p)`. Critic targets bootstrap from the
//! minimum of the two target critics; both actors ascend critic 1 through its
//! input gradient. The discrete actor is differentiated through a softmax
//! relaxation of its scores, so critics consume a `K + 1` action vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::explore::{clip_to_box, clipped_noise, LinearDecay};
use super::replay::{ReplayBuffer, Transition};
use super::updates::{argmax, ascend_action_actor, ascend_param_actor, one_hot, Batch};
use super::{Agent, Exploration, TrainDiagnostics};
use crate::error::{Error, Result};
use crate::nn::{soft_update, standard_mlp, Adam, Head, Matrix, Mlp, INIT_STD};
use crate::sim::{Decision, ParamAction, Placement, StepRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatConfig {
    pub gamma: f64,
    pub tau: f64,
    pub eps: f64,
    pub eps_min: f64,
    pub eps_decay: f64,
    pub lr: f64,
    pub sigma_noise: f64,
    pub clip_c: f64,
    pub clip_c_min: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub warmup_size: usize,
    pub updates_per_epoch: usize,
}

impl Default for PatConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            tau: 5e-3,
            eps: 0.8,
            eps_min: 0.05,
            eps_decay: 1e-3,
            lr: 1e-3,
            sigma_noise: 0.2,
            clip_c: 0.5,
            clip_c_min: 0.1,
            batch_size: 128,
            buffer_capacity: 100_000,
            warmup_size: 5_000,
            updates_per_epoch: 1,
        }
    }
}

impl PatConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::validation(format!("agent: {m}")));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau must lie in (0, 1]");
        }
        if !(0.0 <= self.eps_min && self.eps_min <= self.eps && self.eps <= 1.0) {
            return bad("requires 0 <= eps_min <= eps <= 1");
        }
        if !(self.eps_decay >= 0.0) {
            return bad("eps_decay must be >= 0");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be > 0");
        }
        if !(self.sigma_noise >= 0.0) {
            return bad("sigma_noise must be >= 0");
        }
        if !(0.0 <= self.clip_c_min && self.clip_c_min <= self.clip_c) {
            return bad("requires 0 <= clip_c_min <= clip_c");
        }
        if !(1 <= self.batch_size
            && self.batch_size <= self.warmup_size
            && self.warmup_size <= self.buffer_capacity)
        {
            return bad("requires 1 <= batch_size <= warmup_size <= buffer_capacity");
        }
        Ok(())
    }
}

/// `r + gamma * min(q1, q2)`.
pub fn twin_target(reward: f64, gamma: f64, q1: f64, q2: f64) -> f64 {
    reward + gamma * q1.min(q2)
}

/// All learned state: eight networks, four optimizers and exploration levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatNetworks {
    pub actor_action: Mlp,
    pub actor_param: Mlp,
    pub critic_1: Mlp,
    pub critic_2: Mlp,
    pub target_actor_action: Mlp,
    pub target_actor_param: Mlp,
    pub target_critic_1: Mlp,
    pub target_critic_2: Mlp,
    pub opt_actor_action: Adam,
    pub opt_actor_param: Adam,
    pub opt_critic_1: Adam,
    pub opt_critic_2: Adam,
    pub eps: LinearDecay,
    pub clip_c: LinearDecay,
    pub updates: u64,
}

/// Targets of a batch together with the two target-critic values behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetEstimates {
    pub y: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

pub struct PatAgent {
    cfg: PatConfig,
    state_dim: usize,
    n_actions: usize,
    scale: [f64; 2],
    nets: PatNetworks,
    buffer: ReplayBuffer,
    rng: ChaCha8Rng,
}

impl PatAgent {
    /// Builds the networks for `state_dim` features and `k_servers + 1`
    /// placements; parameter deltas live in `[-scale, scale]`.
    pub fn new(
        cfg: PatConfig,
        state_dim: usize,
        k_servers: usize,
        scale: [f64; 2],
        mut rng: ChaCha8Rng,
    ) -> Result<Self> {
        cfg.validate()?;
        let n_actions = k_servers + 1;
        let mut init = |input: usize, output: usize, head: Head| -> Result<Mlp> {
            let mut m = standard_mlp(input, output, head)?;
            m.xavier_init(Some(INIT_STD), &mut rng);
            Ok(m)
        };
        let actor_action = init(state_dim, n_actions, Head::Linear)?;
        let actor_param = init(
            state_dim + n_actions,
            2,
            Head::Tanh {
                scale: scale.to_vec(),
            },
        )?;
        let critic_1 = init(state_dim + n_actions + 2, 1, Head::Linear)?;
        let critic_2 = init(state_dim + n_actions + 2, 1, Head::Linear)?;
        let nets = PatNetworks {
            opt_actor_action: Adam::new(&actor_action, cfg.lr),
            opt_actor_param: Adam::new(&actor_param, cfg.lr),
            opt_critic_1: Adam::new(&critic_1, cfg.lr),
            opt_critic_2: Adam::new(&critic_2, cfg.lr),
            target_actor_action: actor_action.clone(),
            target_actor_param: actor_param.clone(),
            target_critic_1: critic_1.clone(),
            target_critic_2: critic_2.clone(),
            actor_action,
            actor_param,
            critic_1,
            critic_2,
            eps: LinearDecay::new(cfg.eps, cfg.eps_min, cfg.eps_decay),
            clip_c: LinearDecay::new(cfg.clip_c, cfg.clip_c_min, cfg.eps_decay),
            updates: 0,
        };
        let buffer = ReplayBuffer::new(cfg.buffer_capacity);
        Ok(Self {
            cfg,
            state_dim,
            n_actions,
            scale,
            nets,
            buffer,
            rng,
        })
    }

    pub fn config(&self) -> &PatConfig {
        &self.cfg
    }

    pub fn networks(&self) -> &PatNetworks {
        &self.nets
    }

    pub fn networks_mut(&mut self) -> &mut PatNetworks {
        &mut self.nets
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn scale(&self) -> [f64; 2] {
        self.scale
    }

    fn cloud_index(&self) -> usize {
        self.n_actions - 1
    }

    /// Discrete index and parameters for `state`.
    pub fn select_action(&mut self, state: &[f64], explore: bool) -> (usize, [f64; 2]) {
        debug_assert_eq!(state.len(), self.state_dim);
        let index = if explore && self.rng.random_bool(self.nets.eps.value) {
            self.rng.random_range(0..self.n_actions)
        } else {
            argmax(&self.nets.actor_action.predict(state))
        };
        if index == self.cloud_index() {
            return (index, [0.0, 0.0]);
        }
        let mut input = state.to_vec();
        input.extend(one_hot(index, self.n_actions));
        let out = self.nets.actor_param.predict(&input);
        let mut p = [out[0], out[1]];
        if explore {
            let w = clipped_noise(
                self.cfg.sigma_noise,
                self.nets.clip_c.value,
                self.scale,
                &mut self.rng,
            );
            p = [p[0] + w[0], p[1] + w[1]];
        }
        (index, clip_to_box(p, self.scale))
    }

    pub fn store(&mut self, t: Transition) {
        self.buffer.push(t);
    }

    fn critic_input(&self, states: &Matrix, actions: &Matrix, params: &Matrix) -> Result<Matrix> {
        states.hcat(actions)?.hcat(params)
    }

    /// Bootstrapped targets from the target networks, with clipped smoothing
    /// noise on the target parameters.
    pub fn compute_targets(&mut self, batch: &Batch) -> Result<TargetEstimates> {
        let s2 = &batch.next_states;
        let scores = self.nets.target_actor_action.forward(s2).output;
        let a_next: Vec<usize> = (0..s2.rows()).map(|r| argmax(scores.row(r))).collect();
        let a_mat = Matrix::from_rows(
            &a_next
                .iter()
                .map(|&a| one_hot(a, self.n_actions))
                .collect::<Vec<_>>(),
        )?;
        let p_raw = self
            .nets
            .target_actor_param
            .forward(&s2.hcat(&a_mat)?)
            .output;
        let mut p_norm = Matrix::zeros(s2.rows(), 2);
        for r in 0..s2.rows() {
            if a_next[r] == self.cloud_index() {
                continue;
            }
            let w = clipped_noise(
                self.cfg.sigma_noise,
                self.nets.clip_c.value,
                self.scale,
                &mut self.rng,
            );
            let p = clip_to_box([p_raw.get(r, 0) + w[0], p_raw.get(r, 1) + w[1]], self.scale);
            p_norm.set(r, 0, p[0] / self.scale[0]);
            p_norm.set(r, 1, p[1] / self.scale[1]);
        }
        let x = self.critic_input(s2, &a_mat, &p_norm)?;
        let q1 = self.nets.target_critic_1.forward(&x).output.into_data();
        let q2 = self.nets.target_critic_2.forward(&x).output.into_data();
        let y = batch
            .rewards
            .iter()
            .zip(q1.iter().zip(&q2))
            .map(|(r, (a, b))| twin_target(*r, self.cfg.gamma, *a, *b))
            .collect();
        Ok(TargetEstimates { y, q1, q2 })
    }

    /// One Adam step per critic on the mean squared TD error; returns the
    /// pre-step losses.
    pub fn update_critics(&mut self, batch: &Batch, targets: &[f64]) -> Result<[f64; 2]> {
        let x = self.critic_input(&batch.states, &batch.actions, &batch.params)?;
        let n = batch.len() as f64;
        let mut losses = [0.0; 2];
        let nets = &mut self.nets;
        for (i, (critic, opt)) in [
            (&mut nets.critic_1, &mut nets.opt_critic_1),
            (&mut nets.critic_2, &mut nets.opt_critic_2),
        ]
        .into_iter()
        .enumerate()
        {
            let cache = critic.forward(&x);
            let mut g = Matrix::zeros(batch.len(), 1);
            let mut loss = 0.0;
            for (r, y) in targets.iter().enumerate() {
                let resid = cache.output.get(r, 0) - y;
                loss += resid * resid;
                g.set(r, 0, 2.0 * resid / n);
            }
            losses[i] = loss / n;
            let grads = critic.backward(&cache, &g);
            opt.step(critic, &grads)?;
        }
        Ok(losses)
    }

    /// Ascends critic 1 with respect to both actors; critics are untouched.
    pub fn update_actors(&mut self, batch: &Batch) -> Result<()> {
        let s_dim = self.state_dim;
        let n_act = self.n_actions;
        let scale = self.scale;
        let nets = &mut self.nets;
        let critic = &nets.critic_1;

        let actor_in = batch.states.hcat(&batch.actions)?;
        ascend_param_actor(&mut nets.actor_param, &mut nets.opt_actor_param, &actor_in, |p| {
            let mut p_norm = p.clone();
            for r in 0..p_norm.rows() {
                for (v, s) in p_norm.row_mut(r).iter_mut().zip(scale) {
                    *v /= s;
                }
            }
            let x = batch.states.hcat(&batch.actions)?.hcat(&p_norm)?;
            let cache = critic.forward(&x);
            let gin = critic.input_grad(&cache, &Matrix::from_vec(x.rows(), 1, vec![1.0; x.rows()])?);
            let mut g = gin.columns(s_dim + n_act, s_dim + n_act + 2);
            for r in 0..g.rows() {
                // offloads execute zero parameters whatever the actor says
                let live = batch.action_index[r] != n_act - 1;
                for (v, s) in g.row_mut(r).iter_mut().zip(scale) {
                    *v = if live { *v / s } else { 0.0 };
                }
            }
            Ok(g)
        })?;

        ascend_action_actor(&mut nets.actor_action, &mut nets.opt_actor_action, &batch.states, |soft| {
            let x = batch.states.hcat(soft)?.hcat(&batch.params)?;
            let cache = critic.forward(&x);
            let gin = critic.input_grad(&cache, &Matrix::from_vec(x.rows(), 1, vec![1.0; x.rows()])?);
            Ok(gin.columns(s_dim, s_dim + n_act))
        })
    }

    pub fn update_targets(&mut self) -> Result<()> {
        let tau = self.cfg.tau;
        let n = &mut self.nets;
        soft_update(&mut n.target_actor_action, &n.actor_action, tau)?;
        soft_update(&mut n.target_actor_param, &n.actor_param, tau)?;
        soft_update(&mut n.target_critic_1, &n.critic_1, tau)?;
        soft_update(&mut n.target_critic_2, &n.critic_2, tau)
    }

    /// Full learning update on one uniformly sampled batch. A no-op until the
    /// replay buffer holds `warmup_size` transitions.
    pub fn train_step(&mut self) -> Result<TrainDiagnostics> {
        if self.buffer.len() < self.cfg.warmup_size {
            return Ok(TrainDiagnostics::default());
        }
        let batch = {
            let items = self.buffer.sample(self.cfg.batch_size, &mut self.rng);
            Batch::from_transitions(&items, self.n_actions, self.scale)?
        };
        let targets = self.compute_targets(&batch)?;
        let losses = self.update_critics(&batch, &targets.y)?;
        self.update_actors(&batch)?;
        self.update_targets()?;
        self.nets.eps.step();
        self.nets.clip_c.step();
        self.nets.updates += 1;
        Ok(TrainDiagnostics {
            trained: true,
            updates: 1,
            critic_loss: 0.5 * (losses[0] + losses[1]),
        })
    }

    /// Replaces the random stream, e.g. after restoring a checkpoint.
    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }
}

impl Agent for PatAgent {
    fn name(&self) -> &str {
        "pat"
    }

    fn act(&mut self, decision: &Decision<'_>, explore: bool) -> Result<ParamAction> {
        let (index, p) = self.select_action(decision.features, explore);
        let target = Placement::from_index(index, self.n_actions - 1)?;
        Ok(match target {
            Placement::Cloud => ParamAction::offload(),
            Placement::Server(k) => ParamAction::server(k, p[0], p[1]),
        })
    }

    fn observe(&mut self, record: &StepRecord) {
        self.store(Transition::from_record(record, self.n_actions - 1));
    }

    fn train(&mut self) -> Result<TrainDiagnostics> {
        let mut diag = TrainDiagnostics::default();
        for _ in 0..self.cfg.updates_per_epoch {
            let d = self.train_step()?;
            if d.trained {
                diag.trained = true;
                diag.updates += 1;
                diag.critic_loss = d.critic_loss;
            }
        }
        Ok(diag)
    }

    fn exploration(&self) -> Option<Exploration> {
        Some(Exploration {
            eps: self.nets.eps.value,
            clip_c: self.nets.clip_c.value,
        })
    }

    fn checkpoint(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(&self.nets)?)
    }

    fn restore(&mut self, checkpoint: &serde_json::Value) -> Result<()> {
        let nets: PatNetworks = serde_json::from_value(checkpoint.clone())
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        if !nets.actor_action.same_shape(&self.nets.actor_action)
            || !nets.critic_1.same_shape(&self.nets.critic_1)
            || !nets.actor_param.same_shape(&self.nets.actor_param)
        {
            return Err(Error::Checkpoint("network shapes do not match this pool".into()));
        }
        self.nets = nets;
        Ok(())
    }
}
