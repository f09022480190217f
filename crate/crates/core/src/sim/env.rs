//! The orchestration environment: per-request action application, state
//! encoding and the epoch loop.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cost::{agent_cost, CostModel};
use super::model::{CostParams, PoolConfig, TrafficConfig, VnfSpec};
use super::state::{AllocationState, ParamAction, Placement, CAPACITY_EPS};
use super::traffic::{
    count_leavers, sample_arrivals, sample_cloud_rate, sample_rate_block, EpochTraffic,
};
use crate::error::{Error, Result};

/// Everything needed to build an environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub pool: PoolConfig,
    pub vnfs: Vec<VnfSpec>,
    pub costs: CostParams,
    pub traffic: TrafficConfig,
    /// Weight of the network cost inside the training cost.
    pub beta: f64,
    /// Normalizer that maps the training cost into `[-1, 1]`.
    pub gamma_max: f64,
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        self.pool.validate()?;
        self.costs.validate()?;
        self.traffic.validate()?;
        if self.vnfs.is_empty() {
            return Err(Error::validation("vnfs must not be empty"));
        }
        if self.vnfs.len() != self.pool.n_vnfs {
            return Err(Error::validation(format!(
                "pool.n_vnfs = {} but {} vnfs are listed",
                self.pool.n_vnfs,
                self.vnfs.len()
            )));
        }
        for (j, v) in self.vnfs.iter().enumerate() {
            if v.id != j {
                return Err(Error::validation(format!("vnfs[{j}].id must equal its position ({j})")));
            }
            v.validate()?;
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::validation("beta must be >= 0"));
        }
        if !(self.gamma_max.is_finite() && self.gamma_max > 0.0) {
            return Err(Error::validation("gamma_max must be > 0"));
        }
        Ok(())
    }

    pub fn k_servers(&self) -> usize {
        self.pool.k_servers
    }

    pub fn n_vnfs(&self) -> usize {
        self.pool.n_vnfs
    }

    /// Number of discrete placements (servers plus the cloud).
    pub fn n_placements(&self) -> usize {
        self.pool.k_servers + 1
    }

    pub fn feature_len(&self) -> usize {
        let (k, n) = (self.k_servers(), self.n_vnfs());
        n + n + (k + 1) * n + k * n + k * n + 1 + n
    }

    /// Componentwise magnitude of the CPU/memory deltas an agent may emit.
    pub fn param_scale(&self) -> [f64; 2] {
        [self.pool.rho_max, self.pool.eta_max]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RequestKind {
    /// A newly arrived user that must be placed.
    NewUser,
    /// A VNF without arrivals this epoch, visited for resizing only.
    Idle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub vnf: usize,
    pub kind: RequestKind,
}

/// Result of applying one action.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub cost_psi: f64,
    pub infeasible: bool,
    pub instance_cost: f64,
    pub network_cost: f64,
    /// Where the user ended up, if the request carried one.
    pub placed: Option<Placement>,
}

/// Applies `action` for `request` to `state` and scores it.
///
/// Deltas that would overflow a server, drive an instance negative, or leave
/// users on an instance without CPU are infeasible: the user (if any) is
/// offloaded and the training cost is pinned at its worst value `+1`. An
/// instance left without users may be shrunk to zero, which tears it down.
pub fn apply_action(
    cfg: &EnvConfig,
    state: &mut AllocationState,
    request: Request,
    action: &ParamAction,
    cloud_rate: f64,
) -> Result<StepOutcome> {
    let j = request.vnf;
    if j >= cfg.n_vnfs() {
        return Err(Error::UnknownVnf {
            index: j,
            n_vnfs: cfg.n_vnfs(),
        });
    }
    let is_user = request.kind == RequestKind::NewUser;
    let cloud = state.cloud();
    let mut infeasible = false;

    let touched = match action.target {
        Placement::Server(k) if k >= cfg.k_servers() => {
            return Err(Error::TargetOutOfRange {
                index: k,
                k_servers: cfg.k_servers(),
            });
        }
        Placement::Server(k) => {
            if try_resize(cfg, state, k, j, action, is_user) {
                k
            } else {
                infeasible = true;
                cloud
            }
        }
        Placement::Cloud => cloud,
    };

    if touched == cloud && is_user {
        let i = state.idx(cloud, j);
        state.users[i] += 1;
        state.sync_cloud(j, &cfg.vnfs[j]);
    }

    let model = CostModel::new(&cfg.costs, &cfg.vnfs, cloud_rate);
    let instance_cost = model.instance_cost(state, touched, j);
    let network_cost = model.network_cost(state);
    let cost_psi = if infeasible {
        1.0
    } else {
        agent_cost(instance_cost, network_cost, cfg.beta, cfg.gamma_max)
    };
    let placed = is_user.then(|| {
        if touched == cloud {
            Placement::Cloud
        } else {
            Placement::Server(touched)
        }
    });
    Ok(StepOutcome {
        cost_psi,
        infeasible,
        instance_cost,
        network_cost,
        placed,
    })
}

/// Applies the deltas to `(k, j)` if the result is feasible.
fn try_resize(
    cfg: &EnvConfig,
    state: &mut AllocationState,
    k: usize,
    j: usize,
    action: &ParamAction,
    add_user: bool,
) -> bool {
    if !(action.d_cpu.is_finite() && action.d_mem.is_finite()) {
        return false;
    }
    let i = state.idx(k, j);
    let users_after = state.users[i] + add_user as u64;
    let mut c_new = state.cpu[i] + action.d_cpu;
    let mut m_new = state.mem[i] + action.d_mem;

    if users_after == 0 {
        c_new = c_new.max(0.0);
        m_new = m_new.max(0.0);
    } else {
        if c_new < -CAPACITY_EPS || m_new < -CAPACITY_EPS {
            return false;
        }
        c_new = c_new.max(0.0);
        m_new = m_new.max(0.0);
        if c_new <= 0.0 {
            return false;
        }
    }
    if c_new <= 0.0 {
        m_new = 0.0;
    }

    let cpu_total = state.server_cpu(k) - state.cpu[i] + c_new;
    let mem_total = state.server_mem(k) - state.mem[i] + m_new;
    if cpu_total > cfg.pool.rho_max + CAPACITY_EPS || mem_total > cfg.pool.eta_max + CAPACITY_EPS {
        return false;
    }
    state.cpu[i] = c_new;
    state.mem[i] = m_new;
    state.users[i] = users_after;
    true
}

const ARRIVAL_SCALE: f64 = 10.0;
const USER_SCALE: f64 = 10.0;

/// Fixed-length normalized feature vector of the state seen by a decision
/// for VNF `request_vnf`.
///
/// Layout: arrivals (N), deployed flags (N), users ((K+1)N), edge CPU (KN),
/// edge memory (KN), cloud rate (1), requested-VNF one-hot (N).
pub fn encode_state(
    cfg: &EnvConfig,
    state: &AllocationState,
    traffic: &EpochTraffic,
    request_vnf: usize,
) -> Vec<f64> {
    let (k, n) = (cfg.k_servers(), cfg.n_vnfs());
    let mut f = Vec::with_capacity(cfg.feature_len());
    f.extend(traffic.arrivals.iter().map(|&a| a as f64 / ARRIVAL_SCALE));
    f.extend((0..n).map(|j| if state.vnf_deployed(j) { 1.0 } else { 0.0 }));
    f.extend(state.users.iter().map(|&u| u as f64 / USER_SCALE));
    f.extend(state.cpu[..k * n].iter().map(|c| c / cfg.pool.rho_max));
    f.extend(state.mem[..k * n].iter().map(|m| m / cfg.pool.eta_max));
    f.push(traffic.cloud_rate / cfg.traffic.mu_r.max(cfg.traffic.r_min));
    f.extend((0..n).map(|j| if j == request_vnf { 1.0 } else { 0.0 }));
    debug_assert_eq!(f.len(), cfg.feature_len());
    f
}

/// Removes departing users; each user independently stays with its VNF's
/// `p_stay`. Users are visited VNF by VNF so that the number of random draws
/// depends only on per-VNF totals, not on where users were placed.
pub fn apply_departures<R: Rng + ?Sized>(
    state: &mut AllocationState,
    specs: &[VnfSpec],
    rng: &mut R,
) -> Vec<u64> {
    let mut leavers = vec![0; state.users.len()];
    for (j, spec) in specs.iter().enumerate() {
        for k in 0..=state.k_servers() {
            let i = state.idx(k, j);
            let gone = count_leavers(state.users[i], spec.p_stay, rng);
            state.users[i] -= gone;
            leavers[i] = gone;
        }
        state.sync_cloud(j, spec);
    }
    leavers
}

/// What a policy sees when asked for an action.
#[derive(Debug, Clone, Copy)]
pub struct Decision<'a> {
    pub features: &'a [f64],
    pub state: &'a AllocationState,
    pub traffic: &'a EpochTraffic,
    pub request: Request,
    pub config: &'a EnvConfig,
}

/// One stored interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub request: Request,
    pub state: Vec<f64>,
    pub action: ParamAction,
    pub cost_psi: f64,
    pub infeasible: bool,
    pub next_state: Vec<f64>,
}

/// Aggregate view of one epoch, measured after every request was served and
/// before departures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: u64,
    pub network_cost: f64,
    pub latency_per_user: f64,
    pub financial_per_user: f64,
    pub sla_per_user: f64,
    pub cpu_util: f64,
    pub mem_util: f64,
    pub cloud_fraction: f64,
    pub active_users: u64,
    pub mean_psi: f64,
    pub infeasible: u64,
    pub arrivals: u64,
    pub departures: u64,
    pub cloud_rate: f64,
}

#[derive(Debug, Clone)]
pub struct EpochReport {
    pub stats: EpochStats,
    pub transitions: Vec<StepRecord>,
    /// Allocation at measurement time.
    pub snapshot: AllocationState,
    pub traffic: EpochTraffic,
}

/// Seeded environment instance.
#[derive(Debug, Clone)]
pub struct VnfEnv {
    cfg: EnvConfig,
    state: AllocationState,
    lambdas: Vec<f64>,
    epoch: u64,
    rng: ChaCha8Rng,
    admitted: u64,
    departed: u64,
    /// Traffic and visit order of the coming epoch, drawn one epoch early so
    /// the last decision of an epoch can see its successor.
    upcoming: Option<(EpochTraffic, Vec<usize>)>,
}

impl VnfEnv {
    pub fn new(cfg: EnvConfig, rng: ChaCha8Rng) -> Result<Self> {
        cfg.validate()?;
        let state = AllocationState::empty(cfg.k_servers(), cfg.n_vnfs());
        let lambdas = vec![0.0; cfg.n_vnfs()];
        Ok(Self {
            cfg,
            state,
            lambdas,
            epoch: 0,
            rng,
            admitted: 0,
            departed: 0,
            upcoming: None,
        })
    }

    pub fn from_seed(cfg: EnvConfig, seed: u64) -> Result<Self> {
        Self::new(cfg, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn state(&self) -> &AllocationState {
        &self.state
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn admitted(&self) -> u64 {
        self.admitted
    }

    pub fn departed(&self) -> u64 {
        self.departed
    }

    /// Samples the traffic and VNF visit order of epoch `self.epoch`.
    fn draw_traffic(&mut self) -> (EpochTraffic, Vec<usize>) {
        if self.epoch % self.cfg.traffic.t_max == 0 {
            for (j, spec) in self.cfg.vnfs.iter().enumerate() {
                self.lambdas[j] = sample_rate_block(spec, &mut self.rng);
            }
        }
        let cloud_rate = sample_cloud_rate(&self.cfg.traffic, &mut self.rng);
        let arrivals = sample_arrivals(&self.lambdas, self.cfg.traffic.slot_t, &mut self.rng);
        let traffic = EpochTraffic {
            arrivals,
            lambdas: self.lambdas.clone(),
            cloud_rate,
            epoch: self.epoch,
        };
        let mut order: Vec<usize> = (0..self.cfg.n_vnfs()).collect();
        order.shuffle(&mut self.rng);
        (traffic, order)
    }

    /// Runs one decision epoch, asking `policy` for every action.
    pub fn advance_epoch<F>(&mut self, mut policy: F) -> Result<EpochReport>
    where
        F: FnMut(&Decision<'_>) -> Result<ParamAction>,
    {
        let (traffic, order) = match self.upcoming.take() {
            Some(drawn) => drawn,
            None => self.draw_traffic(),
        };
        let cloud_rate = traffic.cloud_rate;
        let mut transitions = Vec::new();
        let mut infeasible = 0;
        for &j in &order {
            let n_j = traffic.arrivals[j];
            let (count, kind) = if n_j == 0 {
                (1, RequestKind::Idle)
            } else {
                (n_j, RequestKind::NewUser)
            };
            for _ in 0..count {
                let request = Request { vnf: j, kind };
                let features = encode_state(&self.cfg, &self.state, &traffic, j);
                let action = policy(&Decision {
                    features: &features,
                    state: &self.state,
                    traffic: &traffic,
                    request,
                    config: &self.cfg,
                })?;
                let outcome =
                    apply_action(&self.cfg, &mut self.state, request, &action, cloud_rate)?;
                if kind == RequestKind::NewUser {
                    self.admitted += 1;
                }
                infeasible += outcome.infeasible as u64;
                // the successor is the next decision's view; patched below
                let next_state = Vec::new();
                transitions.push(StepRecord {
                    request,
                    state: features,
                    action,
                    cost_psi: outcome.cost_psi,
                    infeasible: outcome.infeasible,
                    next_state,
                });
            }
        }

        let snapshot = self.state.clone();
        let mut stats = measure(&self.cfg, &snapshot, cloud_rate);
        stats.epoch = self.epoch;
        stats.mean_psi = if transitions.is_empty() {
            0.0
        } else {
            transitions.iter().map(|t| t.cost_psi).sum::<f64>() / transitions.len() as f64
        };
        stats.infeasible = infeasible;
        stats.arrivals = traffic.arrivals.iter().sum();

        let leavers = apply_departures(&mut self.state, &self.cfg.vnfs, &mut self.rng);
        stats.departures = leavers.iter().sum();
        self.departed += stats.departures;
        self.state.roll_epoch();
        self.epoch += 1;

        let upcoming = self.draw_traffic();
        let last = encode_state(&self.cfg, &self.state, &upcoming.0, upcoming.1[0]);
        self.upcoming = Some(upcoming);
        for i in 1..transitions.len() {
            transitions[i - 1].next_state = transitions[i].state.clone();
        }
        if let Some(t) = transitions.last_mut() {
            t.next_state = last;
        }

        Ok(EpochReport {
            stats,
            transitions,
            snapshot,
            traffic,
        })
    }
}

/// Cost and utilization aggregates of a measured allocation. Epoch-level
/// fields that depend on the decision stream are left at zero.
pub fn measure(cfg: &EnvConfig, state: &AllocationState, cloud_rate: f64) -> EpochStats {
    let model = CostModel::new(&cfg.costs, &cfg.vnfs, cloud_rate);
    let terms = model.network_terms(state);
    let per_user = terms.users.max(1.0);
    let k = cfg.k_servers();
    let cpu: f64 = (0..k).map(|s| state.server_cpu(s)).sum();
    let mem: f64 = (0..k).map(|s| state.server_mem(s)).sum();
    let total = state.total_users();
    EpochStats {
        epoch: 0,
        network_cost: terms.weighted(&cfg.costs) / per_user,
        latency_per_user: terms.latency / per_user,
        financial_per_user: terms.financial / per_user,
        sla_per_user: terms.sla / per_user,
        cpu_util: cpu / (k as f64 * cfg.pool.rho_max),
        mem_util: mem / (k as f64 * cfg.pool.eta_max),
        cloud_fraction: if total == 0 {
            0.0
        } else {
            state.cloud_users() as f64 / total as f64
        },
        active_users: total,
        mean_psi: 0.0,
        infeasible: 0,
        arrivals: 0,
        departures: 0,
        cloud_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::model::reference_vnfs;

    pub(crate) fn small_config(k: usize, n: usize) -> EnvConfig {
        EnvConfig {
            pool: PoolConfig {
                k_servers: k,
                rho_max: 50.0,
                eta_max: 50.0,
                n_vnfs: n,
            },
            vnfs: reference_vnfs().into_iter().take(n).collect(),
            costs: CostParams::default(),
            traffic: TrafficConfig::default(),
            beta: 0.2,
            gamma_max: 100.0,
        }
    }

    fn user(j: usize) -> Request {
        Request {
            vnf: j,
            kind: RequestKind::NewUser,
        }
    }

    #[test]
    fn horizontal_deploy_includes_boot_latency() {
        let cfg = small_config(10, 10);
        let mut s = AllocationState::empty(10, 10);
        let out = apply_action(&cfg, &mut s, user(0), &ParamAction::server(0, 4.0, 8.0), 10.0)
            .unwrap();
        assert!(!out.infeasible);
        assert_eq!((s.cpu_at(0, 0), s.mem_at(0, 0), s.users_at(0, 0)), (4.0, 8.0, 1));
        let model = CostModel::new(&cfg.costs, &cfg.vnfs, 10.0);
        let t = model.instance_terms(&s, 0, 0);
        // boot 20 + resize 4*3 + 8*4
        assert_eq!(t.latency, 64.0);
        assert_eq!(out.placed, Some(Placement::Server(0)));
    }

    #[test]
    fn over_capacity_is_offloaded_with_worst_cost() {
        let cfg = small_config(10, 10);
        let mut s = AllocationState::empty(10, 10);
        let out = apply_action(&cfg, &mut s, user(0), &ParamAction::server(0, 60.0, 0.0), 10.0)
            .unwrap();
        assert!(out.infeasible);
        assert_eq!(out.cost_psi, 1.0);
        assert_eq!(s.users_at(s.cloud(), 0), 1);
        assert_eq!(s.cpu_at(0, 0), 0.0);
        assert_eq!(out.placed, Some(Placement::Cloud));
    }

    #[test]
    fn offload_gets_max_qos() {
        let cfg = small_config(10, 10);
        let mut s = AllocationState::empty(10, 10);
        apply_action(&cfg, &mut s, user(0), &ParamAction::offload(), 14.0).unwrap();
        let model = CostModel::new(&cfg.costs, &cfg.vnfs, 14.0);
        assert_eq!(model.instance_qos(&s, s.cloud(), 0), 70.0);
    }

    #[test]
    fn user_on_zero_cpu_is_infeasible() {
        let cfg = small_config(2, 2);
        let mut s = AllocationState::empty(2, 2);
        let out = apply_action(&cfg, &mut s, user(1), &ParamAction::server(1, 0.0, 3.0), 10.0)
            .unwrap();
        assert!(out.infeasible);
        let out = apply_action(&cfg, &mut s, user(1), &ParamAction::server(1, -1.0, 3.0), 10.0)
            .unwrap();
        assert!(out.infeasible);
    }

    #[test]
    fn idle_visit_can_tear_down() {
        let cfg = small_config(2, 2);
        let mut s = AllocationState::empty(2, 2);
        let i = s.idx(0, 1);
        s.cpu[i] = 5.0;
        s.mem[i] = 4.0;
        let idle = Request {
            vnf: 1,
            kind: RequestKind::Idle,
        };
        let out = apply_action(&cfg, &mut s, idle, &ParamAction::server(0, -9.0, -1.0), 10.0)
            .unwrap();
        assert!(!out.infeasible);
        assert_eq!((s.cpu[i], s.mem[i]), (0.0, 0.0));
        // cloud target with no user is a no-op
        let before = s.clone();
        apply_action(&cfg, &mut s, idle, &ParamAction::offload(), 10.0).unwrap();
        assert_eq!(before, s);
    }

    #[test]
    fn bad_indices_are_input_errors() {
        let cfg = small_config(2, 2);
        let mut s = AllocationState::empty(2, 2);
        assert!(matches!(
            apply_action(&cfg, &mut s, user(5), &ParamAction::offload(), 10.0),
            Err(Error::UnknownVnf { .. })
        ));
        assert!(matches!(
            apply_action(&cfg, &mut s, user(0), &ParamAction::server(2, 1.0, 1.0), 10.0),
            Err(Error::TargetOutOfRange { .. })
        ));
    }

    #[test]
    fn encoding_length_and_empty_pattern() {
        let cfg = small_config(10, 10);
        assert_eq!(cfg.feature_len(), 341);
        let s = AllocationState::empty(10, 10);
        let traffic = EpochTraffic {
            arrivals: vec![0; 10],
            lambdas: vec![0.0; 10],
            cloud_rate: 10.0,
            epoch: 0,
        };
        let f = encode_state(&cfg, &s, &traffic, 3);
        assert_eq!(f.len(), 341);
        let nonzero: Vec<usize> = f
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        // cloud rate slot and the one-hot slot of VNF 3
        assert_eq!(nonzero, vec![330, 334]);
        assert_eq!(f, encode_state(&cfg, &s, &traffic, 3));
    }

    fn zero_traffic_config(n: usize) -> EnvConfig {
        let mut cfg = small_config(2, n);
        for v in &mut cfg.vnfs {
            v.mu_arr = 0.0;
            v.sigma_arr = 0.0;
        }
        cfg
    }

    #[test]
    fn idle_epoch_visits_every_vnf_once() {
        let mut env = VnfEnv::from_seed(zero_traffic_config(3), 7).unwrap();
        let report = env.advance_epoch(|_| Ok(ParamAction::offload())).unwrap();
        assert_eq!(report.transitions.len(), 3);
        let mut seen: Vec<usize> = report.transitions.iter().map(|t| t.request.vnf).collect();
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2]);
    }

    #[test]
    fn transitions_count_requests_plus_idle_visits() {
        // e.g. arrivals (2, 0, 1) give 2 + 1 + 1 + 1 = 5 transitions
        let mut env = VnfEnv::from_seed(small_config(3, 3), 11).unwrap();
        for _ in 0..20 {
            let report = env.advance_epoch(|_| Ok(ParamAction::offload())).unwrap();
            let expected: u64 = report.traffic.arrivals.iter().map(|&a| a.max(1)).sum();
            assert_eq!(report.transitions.len() as u64, expected);
        }
    }

    #[test]
    fn successor_is_the_next_decision_view() {
        let mut env = VnfEnv::from_seed(small_config(3, 3), 21).unwrap();
        let mut previous: Option<StepRecord> = None;
        for _ in 0..30 {
            let report = env
                .advance_epoch(|d| Ok(ParamAction::server(d.request.vnf % 3, 2.0, 2.0)))
                .unwrap();
            if let Some(p) = previous.take() {
                assert_eq!(p.next_state, report.transitions[0].state);
            }
            for w in report.transitions.windows(2) {
                assert_eq!(w[0].next_state, w[1].state);
            }
            previous = report.transitions.last().cloned();
        }
    }

    #[test]
    fn user_conservation() {
        let mut env = VnfEnv::from_seed(small_config(3, 3), 5).unwrap();
        for _ in 0..200 {
            env.advance_epoch(|d| {
                Ok(ParamAction::server(d.request.vnf % 3, 3.0, 3.0))
            })
            .unwrap();
            assert_eq!(env.state().total_users(), env.admitted() - env.departed());
            env.state().check(50.0, 50.0).unwrap();
        }
    }

    #[test]
    fn equal_seeds_give_equal_summaries() {
        let run = || {
            let mut env = VnfEnv::from_seed(small_config(3, 3), 99).unwrap();
            (0..50)
                .map(|_| env.advance_epoch(|_| Ok(ParamAction::offload())).unwrap().stats)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn departures_respect_stay_probability() {
        let specs: Vec<VnfSpec> = reference_vnfs()
            .into_iter()
            .take(1)
            .map(|mut v| {
                v.p_stay = 1.0;
                v
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = AllocationState::empty(1, 1);
        s.users[0] = 10;
        s.cpu[0] = 5.0;
        assert_eq!(apply_departures(&mut s, &specs, &mut rng).iter().sum::<u64>(), 0);
        let specs: Vec<VnfSpec> = specs
            .into_iter()
            .map(|mut v| {
                v.p_stay = 0.0;
                v
            })
            .collect();
        assert_eq!(apply_departures(&mut s, &specs, &mut rng).iter().sum::<u64>(), 10);
        assert_eq!(s.total_users(), 0);
    }
}
