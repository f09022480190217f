use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::greedy::greedy_select;
use crate::agent::Agent;
use crate::error::Result;
use crate::sim::{Decision, ParamAction, Placement};

/// Scan-and-fit rule policy.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyAgent;

impl Agent for GreedyAgent {
    fn name(&self) -> &str {
        "greedy"
    }

    fn act(&mut self, d: &Decision<'_>, _explore: bool) -> Result<ParamAction> {
        Ok(greedy_select(d.config, d.state, d.request))
    }
}

/// Serves every user from the cloud.
#[derive(Debug, Clone, Copy, Default)]
pub struct CloudAgent;

impl Agent for CloudAgent {
    fn name(&self) -> &str {
        "cloud"
    }

    fn act(&mut self, _d: &Decision<'_>, _explore: bool) -> Result<ParamAction> {
        Ok(ParamAction::offload())
    }
}

/// Uniform placement with uniform deltas over the parameter box.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(rng: ChaCha8Rng) -> Self {
        Self { rng }
    }
}

impl Agent for RandomAgent {
    fn name(&self) -> &str {
        "random"
    }

    fn act(&mut self, d: &Decision<'_>, _explore: bool) -> Result<ParamAction> {
        let k = d.config.k_servers();
        let [sc, sm] = d.config.param_scale();
        Ok(match Placement::from_index(self.rng.random_range(0..=k), k)? {
            Placement::Cloud => ParamAction::offload(),
            Placement::Server(s) => {
                ParamAction::server(s, self.rng.random_range(-sc..=sc), self.rng.random_range(-sm..=sm))
            }
        })
    }
}
