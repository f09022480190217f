use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::metrics::EpochMetrics;

/// Per-run means of the comparison indicators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Kpis {
    pub network_cost: f64,
    pub latency_per_user: f64,
    /// Mean financial cost per served user.
    pub cost_efficiency: f64,
    pub sla_per_user: f64,
    pub cpu_util: f64,
    pub mem_util: f64,
    pub cloud_fraction: f64,
    pub mean_reward: f64,
    pub active_users: f64,
}

impl Kpis {
    pub const NAMES: [&'static str; 9] = [
        "network_cost",
        "latency_per_user",
        "cost_efficiency",
        "sla_per_user",
        "cpu_util",
        "mem_util",
        "cloud_fraction",
        "mean_reward",
        "active_users",
    ];

    pub fn values(&self) -> [f64; 9] {
        [
            self.network_cost,
            self.latency_per_user,
            self.cost_efficiency,
            self.sla_per_user,
            self.cpu_util,
            self.mem_util,
            self.cloud_fraction,
            self.mean_reward,
            self.active_users,
        ]
    }

    fn from_values(v: [f64; 9]) -> Self {
        Self {
            network_cost: v[0],
            latency_per_user: v[1],
            cost_efficiency: v[2],
            sla_per_user: v[3],
            cpu_util: v[4],
            mem_util: v[5],
            cloud_fraction: v[6],
            mean_reward: v[7],
            active_users: v[8],
        }
    }

    /// Means over `rows`; all zero for an empty stream.
    pub fn from_metrics(rows: &[EpochMetrics]) -> Self {
        if rows.is_empty() {
            return Self::default();
        }
        let mut sum = [0.0; 9];
        for m in rows {
            let v = [
                m.network_cost,
                m.latency_per_user,
                m.financial_per_user,
                m.sla_per_user,
                m.cpu_util,
                m.mem_util,
                m.cloud_fraction,
                m.mean_reward,
                m.active_users as f64,
            ];
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
        Self::from_values(sum.map(|s| s / rows.len() as f64))
    }

    /// Means over the last `window` rows.
    pub fn trailing(rows: &[EpochMetrics], window: usize) -> Self {
        Self::from_metrics(&rows[rows.len().saturating_sub(window)..])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; zero for a single seed.
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { mean: 0.0, std: 0.0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

/// Indicators aggregated across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiAggregate {
    pub seeds: usize,
    pub indicators: BTreeMap<String, MeanStd>,
}

impl KpiAggregate {
    pub fn of(per_seed: &[Kpis]) -> Self {
        let indicators = Kpis::NAMES
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let xs: Vec<f64> = per_seed.iter().map(|k| k.values()[i]).collect();
                (name.to_string(), MeanStd::of(&xs))
            })
            .collect();
        Self {
            seeds: per_seed.len(),
            indicators,
        }
    }

    pub fn mean(&self, name: &str) -> Option<f64> {
        self.indicators.get(name).map(|m| m.mean)
    }
}
