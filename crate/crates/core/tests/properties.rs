mod common;

use common::qos_oracle;
use proptest::prelude::*;
use vnf_lab::sim::{qos, reference_vnfs, resource_range, AllocationState, CostModel, CostParams};

fn spec_index() -> impl Strategy<Value = usize> {
    0..10usize
}

proptest! {
    #[test]
    fn qos_stays_within_bounds(j in spec_index(), u in 0u64..12, c in -5.0..120.0f64, m in -5.0..120.0f64) {
        let s = &reference_vnfs()[j];
        let q = qos(s, u as f64, c, m);
        prop_assert!((0.0..=s.qos_max).contains(&q));
        prop_assert!((q - qos_oracle(s, u as f64, c, m)).abs() <= 1e-9);
    }

    #[test]
    fn qos_never_drops_with_more_resources(
        j in spec_index(), u in 1u64..12, c in 0.0..100.0f64, m in 0.0..100.0f64,
        dc in 0.0..20.0f64, dm in 0.0..20.0f64,
    ) {
        let s = &reference_vnfs()[j];
        let u = u as f64;
        prop_assert!(qos(s, u, c + dc, m) >= qos(s, u, c, m));
        prop_assert!(qos(s, u, c, m + dm) >= qos(s, u, c, m));
    }

    #[test]
    fn meeting_the_lower_bounds_meets_the_sla(j in spec_index(), u in 1u64..12) {
        let s = &reference_vnfs()[j];
        let r = resource_range(s, u as f64);
        prop_assert!(qos(s, u as f64, r.c_low, r.m_low) >= s.qos_min);
    }

    #[test]
    fn network_cost_is_the_user_weighted_instance_cost(
        seed in any::<u64>(), rate in 1.0..20.0f64,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let specs = reference_vnfs();
        let costs = CostParams::default();
        let (k, n) = (4, specs.len());
        let mut s = AllocationState::empty(k, n);
        for i in 0..(k + 1) * n {
            if rng.random_bool(0.4) {
                s.users[i] = rng.random_range(1..6);
            }
        }
        for kk in 0..k {
            for j in 0..n {
                let i = s.idx(kk, j);
                if s.users[i] > 0 {
                    s.cpu[i] = rng.random_range(0.5..30.0);
                    s.mem[i] = rng.random_range(0.5..30.0);
                }
                if rng.random_bool(0.3) {
                    s.cpu_prev[i] = rng.random_range(0.0..10.0);
                    s.mem_prev[i] = rng.random_range(0.0..10.0);
                }
            }
        }
        for j in 0..n {
            s.sync_cloud(j, &specs[j]);
        }
        let model = CostModel::new(&costs, &specs, rate);
        let total: f64 = (0..=k)
            .flat_map(|kk| (0..n).map(move |j| (kk, j)))
            .map(|(kk, j)| s.users_at(kk, j) as f64 * model.instance_cost(&s, kk, j))
            .sum();
        let users = s.total_users() as f64;
        prop_assert!((model.network_cost(&s) * users.max(1.0) - total).abs() <= 1e-9 * total.abs().max(1.0));
    }
}
