use serde::{Deserialize, Serialize};

use super::model::VnfSpec;
use super::qos::resource_range;
use crate::error::{Error, Result};

/// Where a request is served: one of the edge servers (0-based) or the cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Placement {
    Server(usize),
    Cloud,
}

impl Placement {
    /// Maps a discrete action index in `0..=k_servers` to a placement; index
    /// `k_servers` is the cloud.
    pub fn from_index(index: usize, k_servers: usize) -> Result<Self> {
        match index {
            i if i < k_servers => Ok(Placement::Server(i)),
            i if i == k_servers => Ok(Placement::Cloud),
            i => Err(Error::TargetOutOfRange {
                index: i,
                k_servers,
            }),
        }
    }

    pub fn index(self, k_servers: usize) -> usize {
        match self {
            Placement::Server(k) => k,
            Placement::Cloud => k_servers,
        }
    }
}

/// A discrete placement with its CPU and memory deltas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamAction {
    pub target: Placement,
    pub d_cpu: f64,
    pub d_mem: f64,
}

impl ParamAction {
    pub fn offload() -> Self {
        Self {
            target: Placement::Cloud,
            d_cpu: 0.0,
            d_mem: 0.0,
        }
    }

    pub fn server(k: usize, d_cpu: f64, d_mem: f64) -> Self {
        Self {
            target: Placement::Server(k),
            d_cpu,
            d_mem,
        }
    }
}

/// CPU, memory and user matrices over `(servers + cloud) x VNFs`, row-major,
/// with the last row standing for the cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationState {
    k_servers: usize,
    n_vnfs: usize,
    pub cpu: Vec<f64>,
    pub mem: Vec<f64>,
    pub users: Vec<u64>,
    pub cpu_prev: Vec<f64>,
    pub mem_prev: Vec<f64>,
    pub server_active_prev: Vec<bool>,
}

impl AllocationState {
    pub fn empty(k_servers: usize, n_vnfs: usize) -> Self {
        let cells = (k_servers + 1) * n_vnfs;
        Self {
            k_servers,
            n_vnfs,
            cpu: vec![0.0; cells],
            mem: vec![0.0; cells],
            users: vec![0; cells],
            cpu_prev: vec![0.0; cells],
            mem_prev: vec![0.0; cells],
            server_active_prev: vec![false; k_servers],
        }
    }

    pub fn k_servers(&self) -> usize {
        self.k_servers
    }

    pub fn n_vnfs(&self) -> usize {
        self.n_vnfs
    }

    /// Row index of the cloud.
    pub fn cloud(&self) -> usize {
        self.k_servers
    }

    #[inline]
    pub fn idx(&self, k: usize, j: usize) -> usize {
        debug_assert!(k <= self.k_servers && j < self.n_vnfs);
        k * self.n_vnfs + j
    }

    pub fn cpu_at(&self, k: usize, j: usize) -> f64 {
        self.cpu[self.idx(k, j)]
    }

    pub fn mem_at(&self, k: usize, j: usize) -> f64 {
        self.mem[self.idx(k, j)]
    }

    pub fn users_at(&self, k: usize, j: usize) -> u64 {
        self.users[self.idx(k, j)]
    }

    /// An instance exists where its CPU allocation is positive.
    pub fn is_deployed(&self, k: usize, j: usize) -> bool {
        self.cpu_at(k, j) > 0.0
    }

    pub fn server_cpu(&self, k: usize) -> f64 {
        let row = k * self.n_vnfs;
        self.cpu[row..row + self.n_vnfs].iter().sum()
    }

    pub fn server_mem(&self, k: usize) -> f64 {
        let row = k * self.n_vnfs;
        self.mem[row..row + self.n_vnfs].iter().sum()
    }

    pub fn server_active(&self, k: usize) -> bool {
        self.server_cpu(k) > 0.0
    }

    pub fn server_newly_active(&self, k: usize) -> bool {
        !self.server_active_prev[k] && self.server_active(k)
    }

    pub fn total_users(&self) -> u64 {
        self.users.iter().sum()
    }

    pub fn cloud_users(&self) -> u64 {
        let row = self.cloud() * self.n_vnfs;
        self.users[row..row + self.n_vnfs].iter().sum()
    }

    pub fn vnf_users(&self, j: usize) -> u64 {
        (0..=self.k_servers).map(|k| self.users_at(k, j)).sum()
    }

    /// VNF `j` has at least one instance (edge or cloud).
    pub fn vnf_deployed(&self, j: usize) -> bool {
        (0..=self.k_servers).any(|k| self.is_deployed(k, j))
    }

    /// Refreshes the cloud row of VNF `j` to the upper bounds of its current
    /// user count, or to zero when nobody is offloaded.
    pub fn sync_cloud(&mut self, j: usize, spec: &VnfSpec) {
        let i = self.idx(self.cloud(), j);
        let u = self.users[i];
        if u > 0 {
            let range = resource_range(spec, u as f64);
            self.cpu[i] = range.c_up;
            self.mem[i] = range.m_up;
        } else {
            self.cpu[i] = 0.0;
            self.mem[i] = 0.0;
        }
    }

    /// Freezes the current allocation as the previous-epoch reference.
    pub fn roll_epoch(&mut self) {
        self.cpu_prev.copy_from_slice(&self.cpu);
        self.mem_prev.copy_from_slice(&self.mem);
        for k in 0..self.k_servers {
            self.server_active_prev[k] = self.server_active(k);
        }
    }

    /// Checks the matrix shapes and the nonnegativity and capacity invariants.
    pub fn check(&self, rho_max: f64, eta_max: f64) -> Result<()> {
        let cells = (self.k_servers + 1) * self.n_vnfs;
        if [self.cpu.len(), self.mem.len(), self.users.len()]
            .iter()
            .any(|&l| l != cells)
        {
            return Err(Error::Shape("allocation matrices".into()));
        }
        if self.cpu.iter().chain(&self.mem).any(|v| !(*v >= 0.0)) {
            return Err(Error::validation("negative allocation"));
        }
        for k in 0..self.k_servers {
            if self.server_cpu(k) > rho_max + CAPACITY_EPS || self.server_mem(k) > eta_max + CAPACITY_EPS
            {
                return Err(Error::validation(format!("server {k} over capacity")));
            }
            for j in 0..self.n_vnfs {
                if self.users_at(k, j) > 0 && !self.is_deployed(k, j) {
                    return Err(Error::validation(format!("users on missing instance ({k}, {j})")));
                }
            }
        }
        Ok(())
    }
}

/// Slack allowed on capacity comparisons of accumulated floating-point sums.
pub const CAPACITY_EPS: f64 = 1e-9;
