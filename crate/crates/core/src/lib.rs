//! Simulation and learning core for VNF management and orchestration.
//!
//! - [`sim`]: edge pool / cloud simulator with the full cost model.
//! - [`nn`]: small dense networks with manual backpropagation and Adam.
//! - [`agent`]: the parameterized-action twin-critic learner.
//! - [`baselines`]: greedy, cloud-only, random and two-network DQN/DDPG pairs.
//! - [`harness`]: configuration, seeded experiments, metrics and comparisons.

pub mod agent;
pub mod baselines;
pub mod error;
pub mod harness;
pub mod nn;
pub mod sim;

pub use error::{Error, Result};
