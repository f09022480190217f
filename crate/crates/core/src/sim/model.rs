//! Static description of the pool, the VNF catalogue, the cost model and the
//! traffic process.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-VNF elastic resource profile, QoS bounds and traffic statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VnfSpec {
    pub id: usize,
    pub c0: f64,
    pub cr: f64,
    pub dc: f64,
    pub m0: f64,
    pub mr: f64,
    pub dm: f64,
    pub qos_min: f64,
    pub qos_max: f64,
    pub gamma_sla: f64,
    pub mu_arr: f64,
    pub sigma_arr: f64,
    #[serde(default = "default_p_stay")]
    pub p_stay: f64,
}

fn default_p_stay() -> f64 {
    0.5
}

impl VnfSpec {
    pub fn validate(&self) -> Result<()> {
        let at = |msg: &str| Error::validation(format!("vnfs[{}]: {msg}", self.id));
        let all = [
            self.c0,
            self.cr,
            self.dc,
            self.m0,
            self.mr,
            self.dm,
            self.qos_min,
            self.qos_max,
            self.gamma_sla,
            self.mu_arr,
            self.sigma_arr,
            self.p_stay,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(at("all fields must be finite"));
        }
        if self.c0 < 0.0 || self.m0 < 0.0 {
            return Err(at("c0 and m0 must be nonnegative"));
        }
        if !(self.dc >= 0.0 && self.cr > self.dc) {
            return Err(at("requires cr > dc >= 0"));
        }
        if !(self.dm >= 0.0 && self.mr > self.dm) {
            return Err(at("requires mr > dm >= 0"));
        }
        if !(0.0 <= self.qos_min && self.qos_min <= self.qos_max) {
            return Err(at("requires 0 <= qos_min <= qos_max"));
        }
        if self.gamma_sla < 0.0 {
            return Err(at("gamma_sla must be nonnegative"));
        }
        if self.sigma_arr < 0.0 {
            return Err(at("sigma_arr must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.p_stay) {
            return Err(at("p_stay must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Latency, price and weighting constants of the cost model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParams {
    /// Resize latency per CPU unit.
    pub d_rc: f64,
    /// Resize latency per memory unit.
    pub d_rm: f64,
    /// Container boot delay.
    pub d_db: f64,
    /// Tabulated but not used by any cost term.
    #[serde(default = "default_d_dt")]
    pub d_dt: f64,
    pub c_rp: f64,
    pub c_rm: f64,
    pub c_i0: f64,
    pub c_iv: f64,
    pub c_c0: f64,
    pub c_cv: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    #[serde(default = "one")]
    pub unit_b: f64,
    #[serde(default = "one")]
    pub unit_c: f64,
}

fn default_d_dt() -> f64 {
    10.0
}

fn one() -> f64 {
    1.0
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            d_rc: 3.0,
            d_rm: 4.0,
            d_db: 20.0,
            d_dt: 10.0,
            c_rp: 6.0,
            c_rm: 3.0,
            c_i0: 2.0,
            c_iv: 1.0,
            c_c0: 1.0,
            c_cv: 3.0,
            w1: 1.0,
            w2: 1.0,
            w3: 2.0,
            unit_b: 1.0,
            unit_c: 1.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("d_rc", self.d_rc),
            ("d_rm", self.d_rm),
            ("d_db", self.d_db),
            ("d_dt", self.d_dt),
            ("c_rp", self.c_rp),
            ("c_rm", self.c_rm),
            ("c_i0", self.c_i0),
            ("c_iv", self.c_iv),
            ("c_c0", self.c_c0),
            ("c_cv", self.c_cv),
            ("unit_b", self.unit_b),
            ("unit_c", self.unit_c),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(format!("costs.{name} must be finite and >= 0")));
            }
        }
        for (name, v) in [("w1", self.w1), ("w2", self.w2), ("w3", self.w3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(format!("costs.{name} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Size of the edge pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolConfig {
    pub k_servers: usize,
    pub rho_max: f64,
    pub eta_max: f64,
    pub n_vnfs: usize,
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_servers < 1 {
            return Err(Error::validation("pool.k_servers must be >= 1"));
        }
        if !(self.rho_max.is_finite() && self.rho_max > 0.0) {
            return Err(Error::validation("pool.rho_max must be > 0"));
        }
        if !(self.eta_max.is_finite() && self.eta_max > 0.0) {
            return Err(Error::validation("pool.eta_max must be > 0"));
        }
        if self.n_vnfs < 1 {
            return Err(Error::validation("pool.n_vnfs must be >= 1"));
        }
        Ok(())
    }
}

/// Rate-block length and cloud link statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficConfig {
    pub t_max: u64,
    #[serde(default = "default_mu_r")]
    pub mu_r: f64,
    #[serde(default = "default_sigma_r")]
    pub sigma_r: f64,
    #[serde(default = "one")]
    pub r_min: f64,
    #[serde(rename = "slot_T", default = "one")]
    pub slot_t: f64,
}

fn default_mu_r() -> f64 {
    10.0
}

fn default_sigma_r() -> f64 {
    2.0
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            t_max: 100,
            mu_r: default_mu_r(),
            sigma_r: default_sigma_r(),
            r_min: 1.0,
            slot_t: 1.0,
        }
    }
}

impl TrafficConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 {
            return Err(Error::validation("traffic.t_max must be >= 1"));
        }
        if !(self.r_min.is_finite() && self.r_min > 0.0) {
            return Err(Error::validation("traffic.r_min must be > 0"));
        }
        if !(self.slot_t.is_finite() && self.slot_t > 0.0) {
            return Err(Error::validation("traffic.slot_T must be > 0"));
        }
        if !(self.mu_r.is_finite() && self.sigma_r.is_finite() && self.sigma_r >= 0.0) {
            return Err(Error::validation("traffic.mu_r/sigma_r must be finite, sigma_r >= 0"));
        }
        Ok(())
    }
}

/// The ten VNF profiles used as the reference catalogue.
pub fn reference_vnfs() -> Vec<VnfSpec> {
    #[rustfmt::skip]
    let rows: [[f64; 11]; 10] = [
        [3.0, 5.0, 4.0, 6.0, 5.0, 3.0, 35.0, 70.0, 2.0, 2.0, 1.5],
        [2.0, 3.0, 2.0, 4.0, 4.0, 2.0, 36.0, 80.0, 2.0, 2.5, 0.2],
        [1.0, 4.0, 2.0, 2.0, 3.0, 2.0, 27.0, 63.0, 2.0, 4.0, 0.5],
        [1.0, 4.0, 3.0, 1.0, 3.0, 1.0, 40.0, 90.0, 2.0, 1.0, 1.0],
        [2.0, 6.0, 2.0, 3.0, 4.0, 3.0, 20.0, 100.0, 2.0, 2.5, 1.0],
        [1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 5.0, 30.0, 2.0, 2.0, 1.5],
        [2.0, 3.0, 2.0, 2.0, 5.0, 3.0, 56.0, 80.0, 2.0, 5.0, 1.0],
        [3.0, 4.0, 2.0, 3.0, 6.0, 5.0, 20.0, 53.0, 2.0, 2.0, 1.0],
        [1.0, 4.0, 3.0, 4.0, 4.0, 2.0, 40.0, 90.0, 2.0, 3.0, 0.5],
        [2.0, 6.0, 2.0, 3.0, 4.0, 3.0, 20.0, 100.0, 2.0, 2.0, 1.0],
    ];
    rows.iter()
        .enumerate()
        .map(|(id, r)| VnfSpec {
            id,
            c0: r[0],
            cr: r[1],
            dc: r[2],
            m0: r[3],
            mr: r[4],
            dm: r[5],
            qos_min: r[6],
            qos_max: r[7],
            gamma_sla: r[8],
            mu_arr: r[9],
            sigma_arr: r[10],
            p_stay: default_p_stay(),
        })
        .collect()
}
