use crate::sim::{
    resource_range, state::CAPACITY_EPS, AllocationState, EnvConfig, ParamAction, Request,
    RequestKind,
};

/// Delta that moves `current` to at least `target` despite rounding.
fn delta_to(current: f64, target: f64) -> f64 {
    let mut d = target - current;
    while current + d < target {
        d = d.next_up();
    }
    d
}

fn fits(cfg: &EnvConfig, state: &AllocationState, k: usize, j: usize, cpu: f64, mem: f64) -> bool {
    let cpu_total = state.server_cpu(k) - state.cpu_at(k, j) + cpu;
    let mem_total = state.server_mem(k) - state.mem_at(k, j) + mem;
    cpu_total <= cfg.pool.rho_max + CAPACITY_EPS && mem_total <= cfg.pool.eta_max + CAPACITY_EPS
}

/// Rule-based placement: grow an existing instance to the smallest allocation
/// meeting the SLA, else open a new minimal instance, else offload.
///
/// Idle visits shrink the first instance that is off its minimal allocation
/// (tearing it down once empty) and otherwise leave the pool untouched.
pub fn greedy_select(cfg: &EnvConfig, state: &AllocationState, request: Request) -> ParamAction {
    let j = request.vnf;
    let spec = &cfg.vnfs[j];
    let k_servers = cfg.k_servers();

    if request.kind == RequestKind::Idle {
        for k in 0..k_servers {
            if !state.is_deployed(k, j) {
                continue;
            }
            let u = state.users_at(k, j);
            let (c, m) = if u == 0 {
                (0.0, 0.0)
            } else {
                let r = resource_range(spec, u as f64);
                (r.c_low, r.m_low)
            };
            let (c0, m0) = (state.cpu_at(k, j), state.mem_at(k, j));
            if (c0 == c && m0 == m) || !fits(cfg, state, k, j, c, m) {
                continue;
            }
            if u == 0 {
                return ParamAction::server(k, -c0, -m0);
            }
            return ParamAction::server(k, delta_to(c0, c), delta_to(m0, m));
        }
        return ParamAction::offload();
    }

    for k in (0..k_servers).filter(|&k| state.is_deployed(k, j)) {
        let r = resource_range(spec, (state.users_at(k, j) + 1) as f64);
        if fits(cfg, state, k, j, r.c_low, r.m_low) {
            let (c0, m0) = (state.cpu_at(k, j), state.mem_at(k, j));
            return ParamAction::server(k, delta_to(c0, r.c_low), delta_to(m0, r.m_low));
        }
    }
    let r = resource_range(spec, 1.0);
    for k in (0..k_servers).filter(|&k| !state.is_deployed(k, j)) {
        if r.c_low > 0.0 && fits(cfg, state, k, j, r.c_low, r.m_low) {
            let (c0, m0) = (state.cpu_at(k, j), state.mem_at(k, j));
            return ParamAction::server(k, delta_to(c0, r.c_low), delta_to(m0, r.m_low));
        }
    }
    ParamAction::offload()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{apply_action, qos, reference_vnfs, CostParams, PoolConfig, TrafficConfig};

    fn config() -> EnvConfig {
        EnvConfig {
            pool: PoolConfig {
                k_servers: 3,
                rho_max: 50.0,
                eta_max: 50.0,
                n_vnfs: 3,
            },
            vnfs: reference_vnfs().into_iter().take(3).collect(),
            costs: CostParams::default(),
            traffic: TrafficConfig::default(),
            beta: 0.2,
            gamma_max: 100.0,
        }
    }

    fn user(vnf: usize) -> Request {
        Request {
            vnf,
            kind: RequestKind::NewUser,
        }
    }

    #[test]
    fn empty_pool_deploys_lower_bounds_on_first_server() {
        let cfg = config();
        let s = AllocationState::empty(3, 3);
        let a = greedy_select(&cfg, &s, user(0));
        assert_eq!(a, ParamAction::server(0, 4.0, 8.0));
    }

    #[test]
    fn existing_instance_scales_vertically() {
        let cfg = config();
        let mut s = AllocationState::empty(3, 3);
        let i = s.idx(0, 0);
        s.cpu[i] = 4.0;
        s.mem[i] = 8.0;
        s.users[i] = 1;
        let a = greedy_select(&cfg, &s, user(0));
        assert_eq!(a, ParamAction::server(0, 1.0, 2.0));
    }

    #[test]
    fn saturated_pool_offloads() {
        let cfg = config();
        let mut s = AllocationState::empty(3, 3);
        for k in 0..3 {
            let i = s.idx(k, 1);
            s.cpu[i] = 50.0;
            s.mem[i] = 50.0;
            s.users[i] = 1;
        }
        assert_eq!(greedy_select(&cfg, &s, user(0)), ParamAction::offload());
    }

    #[test]
    fn idle_visit_tears_down_empty_instance() {
        let cfg = config();
        let mut s = AllocationState::empty(3, 3);
        let i = s.idx(1, 2);
        s.cpu[i] = 7.0;
        s.mem[i] = 3.0;
        let idle = Request {
            vnf: 2,
            kind: RequestKind::Idle,
        };
        assert_eq!(greedy_select(&cfg, &s, idle), ParamAction::server(1, -7.0, -3.0));
    }

    #[test]
    fn admissions_stay_feasible_and_meet_the_sla() {
        let cfg = config();
        let mut s = AllocationState::empty(3, 3);
        for step in 0..200 {
            let j = step % 3;
            let a = greedy_select(&cfg, &s, user(j));
            let out = apply_action(&cfg, &mut s, user(j), &a, 10.0).unwrap();
            assert!(!out.infeasible, "step {step}");
            s.check(50.0, 50.0).unwrap();
            if let crate::sim::Placement::Server(k) = a.target {
                let spec = &cfg.vnfs[j];
                let q = qos(spec, s.users_at(k, j) as f64, s.cpu_at(k, j), s.mem_at(k, j));
                assert!(q >= spec.qos_min, "step {step}: {q}");
            }
        }
        assert!(s.cloud_users() > 0);
    }
}
