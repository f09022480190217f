//! Discrete-epoch simulator of VNF placement across an edge pool and a cloud.

pub mod cost;
pub mod env;
pub mod model;
pub mod qos;
pub mod state;
pub mod traffic;

pub use cost::{agent_cost, CostModel, CostTerms};
pub use env::{
    apply_action, apply_departures, encode_state, measure, Decision, EnvConfig, EpochReport,
    EpochStats, Request, RequestKind, StepOutcome, StepRecord, VnfEnv,
};
pub use model::{reference_vnfs, CostParams, PoolConfig, TrafficConfig, VnfSpec};
pub use qos::{qos, resource_range, ResourceRange};
pub use state::{AllocationState, ParamAction, Placement};
pub use traffic::EpochTraffic;
