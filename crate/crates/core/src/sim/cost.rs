//! Latency, financial and SLA cost terms, their per-instance and network-wide
//! aggregates, and the clipped training cost.

use serde::{Deserialize, Serialize};

use super::model::{CostParams, VnfSpec};
use super::qos::{qos, resource_range};
use super::state::AllocationState;

pub fn resize_latency(costs: &CostParams, c_new: f64, c_old: f64, m_new: f64, m_old: f64) -> f64 {
    (c_new - c_old).abs() * costs.d_rc + (m_new - m_old).abs() * costs.d_rm
}

pub fn deployment_latency(costs: &CostParams, c_old: f64, c_new: f64) -> f64 {
    if c_old == 0.0 && c_new > 0.0 {
        costs.d_db
    } else {
        0.0
    }
}

/// Round-trip transfer of the offloaded instance's memory over the cloud link.
pub fn offload_latency(costs: &CostParams, m_up_cloud: f64, rate: f64) -> f64 {
    debug_assert!(rate > 0.0);
    2.0 * m_up_cloud * costs.unit_b / rate
}

pub fn sla_cost(spec: &VnfSpec, qos_value: f64, users: f64) -> f64 {
    let penalty = if qos_value < spec.qos_min {
        spec.gamma_sla
    } else {
        0.0
    };
    (penalty - qos_value) * users
}

/// Clipped, normalized training cost of a single action.
pub fn agent_cost(instance_cost: f64, network_cost: f64, beta: f64, gamma_max: f64) -> f64 {
    ((instance_cost + beta * network_cost) / gamma_max).clamp(-1.0, 1.0)
}

/// Unweighted cost terms of one instance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostTerms {
    pub latency: f64,
    pub financial: f64,
    pub sla: f64,
    pub users: f64,
}

impl CostTerms {
    pub fn weighted(&self, costs: &CostParams) -> f64 {
        costs.w1 * self.latency + costs.w3 * self.sla + costs.w2 * self.financial
    }

    fn accumulate(&mut self, other: &CostTerms) {
        self.latency += other.latency;
        self.financial += other.financial;
        self.sla += other.sla;
        self.users += other.users;
    }
}

/// Read-only view of everything the cost functions need.
#[derive(Debug, Clone, Copy)]
pub struct CostModel<'a> {
    pub costs: &'a CostParams,
    pub specs: &'a [VnfSpec],
    pub cloud_rate: f64,
}

impl<'a> CostModel<'a> {
    pub fn new(costs: &'a CostParams, specs: &'a [VnfSpec], cloud_rate: f64) -> Self {
        Self {
            costs,
            specs,
            cloud_rate,
        }
    }

    /// QoS perceived by the users of instance `(k, j)`; zero when it has no users.
    pub fn instance_qos(&self, state: &AllocationState, k: usize, j: usize) -> f64 {
        let u = state.users_at(k, j) as f64;
        if u < 1.0 {
            return 0.0;
        }
        let spec = &self.specs[j];
        if k == state.cloud() {
            spec.qos_max
        } else {
            qos(spec, u, state.cpu_at(k, j), state.mem_at(k, j))
        }
    }

    pub fn instance_latency(&self, state: &AllocationState, k: usize, j: usize) -> f64 {
        let u = state.users_at(k, j) as f64;
        if u == 0.0 {
            return 0.0;
        }
        if k == state.cloud() {
            let m_up = resource_range(&self.specs[j], u).m_up;
            u * offload_latency(self.costs, m_up, self.cloud_rate)
        } else {
            let i = state.idx(k, j);
            let deploy = deployment_latency(self.costs, state.cpu_prev[i], state.cpu[i]);
            let resize = resize_latency(
                self.costs,
                state.cpu[i],
                state.cpu_prev[i],
                state.mem[i],
                state.mem_prev[i],
            );
            u * (deploy + resize)
        }
    }

    /// Financial cost of `(k, j)`. Deployed instances pay for at least one
    /// user so that idle deployments still carry their economic cost.
    pub fn instance_financial(&self, state: &AllocationState, k: usize, j: usize) -> f64 {
        if !state.is_deployed(k, j) {
            return 0.0;
        }
        let u_eff = (state.users_at(k, j) as f64).max(1.0);
        let i = state.idx(k, j);
        let c = self.costs;
        if k == state.cloud() {
            let newly = state.cpu_prev[i] == 0.0 && state.cpu[i] > 0.0;
            let m_up = resource_range(&self.specs[j], state.users_at(k, j) as f64).m_up;
            u_eff * (if newly { c.c_c0 } else { 0.0 } + m_up * c.c_cv)
        } else {
            let n = state.n_vnfs() as f64;
            let resource = state.cpu[i] * c.c_rp + state.mem[i] * c.c_rm;
            let power_on = if state.server_newly_active(k) {
                c.c_i0 / n
            } else {
                0.0
            };
            let rental = if state.server_active(k) { c.c_iv / n } else { 0.0 };
            u_eff * (resource + power_on + rental)
        }
    }

    pub fn instance_terms(&self, state: &AllocationState, k: usize, j: usize) -> CostTerms {
        let u = state.users_at(k, j) as f64;
        CostTerms {
            latency: self.instance_latency(state, k, j),
            financial: self.instance_financial(state, k, j),
            sla: sla_cost(&self.specs[j], self.instance_qos(state, k, j), u),
            users: u,
        }
    }

    /// Weighted cost of `(k, j)` per user (idle instances count as one user).
    pub fn instance_cost(&self, state: &AllocationState, k: usize, j: usize) -> f64 {
        let t = self.instance_terms(state, k, j);
        t.weighted(self.costs) / t.users.max(1.0)
    }

    /// Sums of the cost terms over every instance, edge and cloud.
    pub fn network_terms(&self, state: &AllocationState) -> CostTerms {
        let mut total = CostTerms::default();
        for k in 0..=state.k_servers() {
            for j in 0..state.n_vnfs() {
                total.accumulate(&self.instance_terms(state, k, j));
            }
        }
        total
    }

    /// Weighted network cost per user in the system.
    pub fn network_cost(&self, state: &AllocationState) -> f64 {
        let t = self.network_terms(state);
        t.weighted(self.costs) / t.users.max(1.0)
    }
}
