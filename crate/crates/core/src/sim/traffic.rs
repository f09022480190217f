//! Random traffic: per-block arrival rates, per-slot Poisson arrivals and the
//! cloud link rate.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::model::{TrafficConfig, VnfSpec};

/// Arrival and link conditions seen by one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochTraffic {
    pub arrivals: Vec<u64>,
    pub lambdas: Vec<f64>,
    pub cloud_rate: f64,
    pub epoch: u64,
}

fn truncated_normal<R: Rng + ?Sized>(mean: f64, std: f64, floor: f64, rng: &mut R) -> f64 {
    let x = if std > 0.0 {
        Normal::new(mean, std)
            .expect("finite mean and positive std")
            .sample(rng)
    } else {
        mean
    };
    x.max(floor)
}

/// Arrival rate for a fresh block: `max(x, 0)` with `x ~ N(mu_arr, sigma_arr)`.
pub fn sample_rate_block<R: Rng + ?Sized>(spec: &VnfSpec, rng: &mut R) -> f64 {
    truncated_normal(spec.mu_arr, spec.sigma_arr, 0.0, rng)
}

/// Independent Poisson(`lambda * slot_t`) arrival counts.
pub fn sample_arrivals<R: Rng + ?Sized>(lambdas: &[f64], slot_t: f64, rng: &mut R) -> Vec<u64> {
    lambdas
        .iter()
        .map(|&lambda| {
            let mean = lambda * slot_t;
            if mean > 0.0 {
                Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
            } else {
                0
            }
        })
        .collect()
}

/// Cloud link rate: `max(x, r_min)` with `x ~ N(mu_r, sigma_r)`.
pub fn sample_cloud_rate<R: Rng + ?Sized>(cfg: &TrafficConfig, rng: &mut R) -> f64 {
    truncated_normal(cfg.mu_r, cfg.sigma_r, cfg.r_min, rng)
}

/// Number of `users` that leave when each stays independently with
/// probability `p_stay`.
pub fn count_leavers<R: Rng + ?Sized>(users: u64, p_stay: f64, rng: &mut R) -> u64 {
    if p_stay >= 1.0 {
        return 0;
    }
    if p_stay <= 0.0 {
        return users;
    }
    (0..users).filter(|_| !rng.random_bool(p_stay)).count() as u64
}
