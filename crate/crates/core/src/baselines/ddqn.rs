use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::DiscretizedGrid;
use super::qnet::{take_rows, PairConfig, Phase, QNet};
use crate::agent::{argmax, one_hot, Agent, Batch, Exploration, LinearDecay, ReplayBuffer, TrainDiagnostics, Transition};
use crate::error::{Error, Result};
use crate::nn::Matrix;
use crate::sim::{Decision, ParamAction, Placement, StepRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DdqnState {
    server: QNet,
    param: QNet,
    eps: LinearDecay,
    updates: u64,
}

/// Double-DQN server selector paired with a Q-network over a lattice of
/// parameter deltas, trained in alternating phases.
pub struct DdqnAgent {
    cfg: PairConfig,
    n_actions: usize,
    scale: [f64; 2],
    grid: DiscretizedGrid,
    state: DdqnState,
    buffer: ReplayBuffer,
    rng: ChaCha8Rng,
}

/// ε-greedy choice over `values`.
pub(crate) fn eps_greedy(values: &[f64], eps: f64, rng: &mut ChaCha8Rng) -> usize {
    if rng.random_bool(eps) {
        rng.random_range(0..values.len())
    } else {
        argmax(values)
    }
}

/// Row-wise `[x | one_hot(a)]`.
pub(crate) fn with_action(x: &Matrix, actions: &[usize], n_actions: usize) -> Result<Matrix> {
    let oh: Vec<Vec<f64>> = actions.iter().map(|&a| one_hot(a, n_actions)).collect();
    x.hcat(&Matrix::from_rows(&oh)?)
}

impl DdqnAgent {
    pub fn new(cfg: PairConfig, state_dim: usize, k_servers: usize, scale: [f64; 2], mut rng: ChaCha8Rng) -> Result<Self> {
        cfg.validate()?;
        let n_actions = k_servers + 1;
        let grid = DiscretizedGrid::new(scale[0], scale[1], cfg.resolution)?;
        let server = QNet::new(state_dim, n_actions, cfg.lr, &mut rng)?;
        let param = QNet::new(state_dim + n_actions, grid.len(), cfg.lr, &mut rng)?;
        Ok(Self {
            state: DdqnState {
                server,
                param,
                eps: LinearDecay::new(cfg.eps, cfg.eps_min, cfg.eps_decay),
                updates: 0,
            },
            buffer: ReplayBuffer::new(cfg.buffer_capacity),
            cfg,
            n_actions,
            scale,
            grid,
            rng,
        })
    }

    pub fn grid(&self) -> &DiscretizedGrid {
        &self.grid
    }

    pub fn eps(&self) -> f64 {
        self.state.eps.value
    }

    /// Lattice cell for `state` and server `server`.
    pub fn select_cell(&mut self, state: &[f64], server: usize, explore: bool) -> usize {
        let mut x = state.to_vec();
        x.extend(one_hot(server, self.n_actions));
        let eps = if explore { self.state.eps.value } else { 0.0 };
        eps_greedy(&self.state.param.values(&x), eps, &mut self.rng)
    }

    pub fn train_step(&mut self) -> Result<TrainDiagnostics> {
        if self.buffer.len() < self.cfg.warmup_size {
            return Ok(TrainDiagnostics::default());
        }
        let items = self.buffer.sample(self.cfg.batch_size, &mut self.rng);
        let batch = Batch::from_transitions(&items, self.n_actions, self.scale)?;
        let cloud = self.n_actions - 1;
        let s = &mut self.state;
        let loss = match Phase::of(s.updates, self.cfg.alternation_period) {
            Phase::Discrete => {
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
                    let next = take_rows(&batch.next_states, &rows)?;
                    let inputs = states.hcat(&take_rows(&batch.actions, &rows)?)?;
                    let server_next = s.server.online.forward(&next).output;
                    let a_next: Vec<usize> = (0..next.rows()).map(|r| argmax(server_next.row(r))).collect();
                    let next_in = with_action(&next, &a_next, self.n_actions)?;
                    let rewards: Vec<f64> = rows.iter().map(|&r| batch.rewards[r]).collect();
                    let mut y = s.param.double_targets(&next_in, &rewards, self.cfg.gamma);
                    // an offloaded successor carries no parameters; value it with the server net
                    let server_tgt = s.server.target.forward(&next).output;
                    for (i, &a) in a_next.iter().enumerate() {
                        if a == cloud {
                            y[i] = rewards[i] + self.cfg.gamma * server_tgt.get(i, cloud);
                        }
                    }
                    let cells: Vec<usize> = rows
                        .iter()
                        .map(|&r| {
                            let p = batch.params.row(r);
                            self.grid.nearest([p[0] * self.scale[0], p[1] * self.scale[1]])
                        })
                        .collect();
                    let l = s.param.regress(&inputs, &cells, &y)?;
                    s.param.track(self.cfg.tau)?;
                    l
                }
            }
        };
        s.eps.step();
        s.updates += 1;
        Ok(TrainDiagnostics {
            trained: true,
            updates: 1,
            critic_loss: loss,
        })
    }
}

impl Agent for DdqnAgent {
    fn name(&self) -> &str {
        "ddqn"
    }

    fn act(&mut self, d: &Decision<'_>, explore: bool) -> Result<ParamAction> {
        let eps = if explore { self.state.eps.value } else { 0.0 };
        let index = eps_greedy(&self.state.server.values(d.features), eps, &mut self.rng);
        Ok(match Placement::from_index(index, self.n_actions - 1)? {
            Placement::Cloud => ParamAction::offload(),
            Placement::Server(k) => {
                let cell = self.select_cell(d.features, index, explore);
                let [dc, dm] = self.grid.delta(cell);
                ParamAction::server(k, dc, dm)
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
            clip_c: 0.0,
        })
    }

    fn checkpoint(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(&self.state)?)
    }

    fn restore(&mut self, checkpoint: &serde_json::Value) -> Result<()> {
        let st: DdqnState =
            serde_json::from_value(checkpoint.clone()).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if !st.server.online.same_shape(&self.state.server.online) || !st.param.online.same_shape(&self.state.param.online) {
            return Err(Error::Checkpoint("network shapes do not match this pool".into()));
        }
        self.state = st;
        Ok(())
    }
}
