//! Comparison policies: rule-based, trivial and value-based learners.

mod ddpg;
mod ddqn;
mod greedy;
mod grid;
mod qnet;
mod simple;

pub use ddpg::DdpgAgent;
pub use ddqn::DdqnAgent;
pub use greedy::greedy_select;
pub use grid::DiscretizedGrid;
pub use qnet::{double_q_target, PairConfig, Phase, QNet};
pub use simple::{CloudAgent, GreedyAgent, RandomAgent};
