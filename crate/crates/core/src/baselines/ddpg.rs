use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ddqn::{eps_greedy, with_action};
use super::qnet::{take_rows, PairConfig, Phase, QNet};
use crate::agent::{
    argmax, ascend_param_actor, clip_to_box, clipped_noise, one_hot, Agent, Batch, Exploration,
    LinearDecay, ReplayBuffer, TrainDiagnostics, Transition,
};
use crate::error::{Error, Result};
use crate::nn::{soft_update, standard_mlp, Adam, Head, Matrix, Mlp, INIT_STD};
use crate::sim::{Decision, ParamAction, Placement, StepRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DdpgState {
    server: QNet,
    actor: Mlp,
    actor_target: Mlp,
    actor_opt: Adam,
    /// Single-output critic over `[state | one_hot | params / scale]`.
    critic: QNet,
    eps: LinearDecay,
    updates: u64,
}

/// Double-DQN server selector paired with a deterministic parameter actor and
/// a single critic, trained in alternating phases.
pub struct DdpgAgent {
    cfg: PairConfig,
    n_actions: usize,
    scale: [f64; 2],
    state: DdpgState,
    buffer: ReplayBuffer,
    rng: ChaCha8Rng,
}

fn normalize(p: &Matrix, scale: [f64; 2]) -> Matrix {
    let mut out = p.clone();
    for r in 0..out.rows() {
        for (v, s) in out.row_mut(r).iter_mut().zip(scale) {
            *v /= s;
        }
    }
    out
}

impl DdpgAgent {
    pub fn new(cfg: PairConfig, state_dim: usize, k_servers: usize, scale: [f64; 2], mut rng: ChaCha8Rng) -> Result<Self> {
        cfg.validate()?;
        let n_actions = k_servers + 1;
        let server = QNet::new(state_dim, n_actions, cfg.lr, &mut rng)?;
        let mut actor = standard_mlp(state_dim + n_actions, 2, Head::Tanh { scale: scale.to_vec() })?;
        actor.xavier_init(Some(INIT_STD), &mut rng);
        let critic = QNet::new(state_dim + n_actions + 2, 1, cfg.lr, &mut rng)?;
        Ok(Self {
            state: DdpgState {
                server,
                actor_target: actor.clone(),
                actor_opt: Adam::new(&actor, cfg.lr),
                actor,
                critic,
                eps: LinearDecay::new(cfg.eps, cfg.eps_min, cfg.eps_decay),
                updates: 0,
            },
            buffer: ReplayBuffer::new(cfg.buffer_capacity),
            cfg,
            n_actions,
            scale,
            rng,
        })
    }

    pub fn actor(&self) -> &Mlp {
        &self.state.actor
    }

    /// `r + gamma * Q_target(s', a', mu_target(s', a'))`, with `a'` the
    /// selector's greedy choice; an offloaded successor is valued by the
    /// selector's target net.
    fn critic_targets(&self, next: &Matrix, rewards: &[f64]) -> Result<Vec<f64>> {
        let cloud = self.n_actions - 1;
        let s = &self.state;
        let server_next = s.server.online.forward(next).output;
        let a_next: Vec<usize> = (0..next.rows()).map(|r| argmax(server_next.row(r))).collect();
        let actor_in = with_action(next, &a_next, self.n_actions)?;
        let p_next = normalize(&s.actor_target.forward(&actor_in).output, self.scale);
        let q = s.critic.target.forward(&actor_in.hcat(&p_next)?).output;
        let server_tgt = s.server.target.forward(next).output;
        Ok(rewards
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let v = if a_next[i] == cloud { server_tgt.get(i, cloud) } else { q.get(i, 0) };
                r + self.cfg.gamma * v
            })
            .collect())
    }

    pub fn train_step(&mut self) -> Result<TrainDiagnostics> {
        if self.buffer.len() < self.cfg.warmup_size {
            return Ok(TrainDiagnostics::default());
        }
        let items = self.buffer.sample(self.cfg.batch_size, &mut self.rng);
        let batch = Batch::from_transitions(&items, self.n_actions, self.scale)?;
        let cloud = self.n_actions - 1;
        let loss = match Phase::of(self.state.updates, self.cfg.alternation_period) {
            Phase::Discrete => {
                let s = &mut self.state;
                let y = s.server.double_targets(&batch.next_states, &batch.rewards, self.cfg.gamma);
                let l = s.server.regress(&batch.states, &batch.action_index, &y)?;
                s.server.track(self.cfg.tau)?;
                l
            }
            Phase::Parameter => {
                let rows: Vec<usize> = (0..batch.len()).filter(|&r| batch.action_index[r] != cloud).collect();
                if rows.is_empty() {
                    0.0
                } else {
                    let states = take_rows(&batch.states, &rows)?;
                    let actor_in = states.hcat(&take_rows(&batch.actions, &rows)?)?;
                    let critic_in = actor_in.hcat(&take_rows(&batch.params, &rows)?)?;
                    let rewards: Vec<f64> = rows.iter().map(|&r| batch.rewards[r]).collect();
                    let y = self.critic_targets(&take_rows(&batch.next_states, &rows)?, &rewards)?;
                    let scale = self.scale;
                    let s = &mut self.state;
                    let l = s.critic.regress(&critic_in, &vec![0; rows.len()], &y)?;
                    let critic = &s.critic.online;
                    let split = actor_in.cols();
                    ascend_param_actor(&mut s.actor, &mut s.actor_opt, &actor_in, |p| {
                        let x = actor_in.hcat(&normalize(p, scale))?;
                        let cache = critic.forward(&x);
                        let ones = Matrix::from_vec(x.rows(), 1, vec![1.0; x.rows()])?;
                        let mut g = critic.input_grad(&cache, &ones).columns(split, split + 2);
                        for r in 0..g.rows() {
                            for (v, sc) in g.row_mut(r).iter_mut().zip(scale) {
                                *v /= sc;
                            }
                        }
                        Ok(g)
                    })?;
                    s.critic.track(self.cfg.tau)?;
                    soft_update(&mut s.actor_target, &s.actor, self.cfg.tau)?;
                    l
                }
            }
        };
        self.state.eps.step();
        self.state.updates += 1;
        Ok(TrainDiagnostics {
            trained: true,
            updates: 1,
            critic_loss: loss,
        })
    }
}

impl Agent for DdpgAgent {
    fn name(&self) -> &str {
        "ddpg"
    }

    fn act(&mut self, d: &Decision<'_>, explore: bool) -> Result<ParamAction> {
        let eps = if explore { self.state.eps.value } else { 0.0 };
        let index = eps_greedy(&self.state.server.values(d.features), eps, &mut self.rng);
        Ok(match Placement::from_index(index, self.n_actions - 1)? {
            Placement::Cloud => ParamAction::offload(),
            Placement::Server(k) => {
                let mut x = d.features.to_vec();
                x.extend(one_hot(index, self.n_actions));
                let out = self.state.actor.predict(&x);
                let mut p = [out[0], out[1]];
                if explore {
                    let w = clipped_noise(self.cfg.sigma_noise, self.cfg.clip_c, self.scale, &mut self.rng);
                    p = clip_to_box([p[0] + w[0], p[1] + w[1]], self.scale);
                }
                ParamAction::server(k, p[0], p[1])
            }
        })
    }

    fn observe(&mut self, record: &StepRecord) {
        self.buffer.push(Transition::from_record(record, self.n_actions - 1));
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
            eps: self.state.eps.value,
            clip_c: self.cfg.clip_c,
        })
    }

    fn checkpoint(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(&self.state)?)
    }

    fn restore(&mut self, checkpoint: &serde_json::Value) -> Result<()> {
        let st: DdpgState =
            serde_json::from_value(checkpoint.clone()).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if !st.server.online.same_shape(&self.state.server.online) || !st.actor.same_shape(&self.state.actor) {
            return Err(Error::Checkpoint("network shapes do not match this pool".into()));
        }
        self.state = st;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn agent() -> DdpgAgent {
        let cfg = PairConfig {
            batch_size: 8,
            warmup_size: 8,
            buffer_capacity: 64,
            alternation_period: 1,
            gamma: 0.5,
            ..PairConfig::default()
        };
        DdpgAgent::new(cfg, 4, 1, [50.0, 50.0], ChaCha8Rng::seed_from_u64(2)).unwrap()
    }

    #[test]
    fn single_critic_target() {
        let mut a = agent();
        // make the selector always prefer the edge server at the next state
        let last = a.state.server.online.layers().len() - 1;
        a.state.server.online.layers_mut()[last].bias = vec![10.0, -10.0];
        let next = Matrix::from_rows(&[[0.1, 0.2, 0.3, 0.4]]).unwrap();
        let y = a.critic_targets(&next, &[0.5]).unwrap();
        let mut x = vec![0.1, 0.2, 0.3, 0.4, 1.0, 0.0];
        let p = a.state.actor_target.predict(&x);
        x.extend([p[0] / 50.0, p[1] / 50.0]);
        let q = a.state.critic.target.predict(&x)[0];
        assert_eq!(y[0], 0.5 + 0.5 * q);
    }

    #[test]
    fn actor_learns_a_quadratic_optimum() {
        // bandit with reward peaked at d_cpu = 20, d_mem = -10
        let mut a = agent();
        for i in 0..64 {
            let p = [-50.0 + 100.0 * (i % 8) as f64 / 7.0, -50.0 + 100.0 * (i / 8) as f64 / 7.0];
            let r = -((p[0] - 20.0) / 50.0).powi(2) - ((p[1] + 10.0) / 50.0).powi(2);
            a.buffer.push(Transition {
                state: vec![1.0, 0.0, 0.0, 0.0],
                action_index: 0,
                params: p,
                reward: r,
                next_state: vec![1.0, 0.0, 0.0, 0.0],
            });
        }
        a.cfg.gamma = 0.0;
        a.cfg.batch_size = 64;
        for _ in 0..3000 {
            a.train_step().unwrap();
        }
        let p = a.actor().predict(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!((p[0] - 20.0).abs() < 5.0 && (p[1] + 10.0).abs() < 5.0, "{p:?}");
    }

    #[test]
    fn actions_stay_in_the_box() {
        let a = agent();
        let out = a.actor().predict(&[1e3, -1e3, 1e3, 1e3, 1.0, 0.0]);
        assert!(out.iter().all(|v| v.abs() <= 50.0));
    }
}
