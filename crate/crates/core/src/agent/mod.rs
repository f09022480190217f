//! Learning agents and the policy interface shared with the baselines.

mod explore;
mod pat;
mod replay;
mod updates;

pub use explore::{clip_to_box, clipped_noise, LinearDecay};
pub use pat::{twin_target, PatAgent, PatConfig, PatNetworks};
pub use replay::{ReplayBuffer, Transition};
pub use updates::{argmax, ascend_action_actor, ascend_param_actor, one_hot, softmax, Batch};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim::{Decision, ParamAction, StepRecord};

/// Outcome of a learning update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainDiagnostics {
    /// False when the update was skipped (e.g. replay still warming up).
    pub trained: bool,
    pub updates: u64,
    pub critic_loss: f64,
}

/// Current exploration levels of a learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exploration {
    pub eps: f64,
    pub clip_c: f64,
}

/// The callback surface every policy implements; the environment asks for one
/// action per request.
pub trait Agent: Send {
    fn name(&self) -> &str;

    fn act(&mut self, decision: &Decision<'_>, explore: bool) -> Result<ParamAction>;

    /// Hands a finished interaction to the agent.
    fn observe(&mut self, _record: &StepRecord) {}

    /// Runs the learning updates due at the end of an epoch.
    fn train(&mut self) -> Result<TrainDiagnostics> {
        Ok(TrainDiagnostics::default())
    }

    fn exploration(&self) -> Option<Exploration> {
        None
    }

    /// Serializes learned state; stateless policies return `Null`.
    fn checkpoint(&self) -> Result<serde_json::Value> {
        Ok(serde_json::Value::Null)
    }

    fn restore(&mut self, _checkpoint: &serde_json::Value) -> Result<()> {
        Ok(())
    }
}
