use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sim::{Placement, StepRecord};

/// One stored interaction, in learner conventions: reward is the negated
/// training cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action_index: usize,
    pub params: [f64; 2],
    pub reward: f64,
    pub next_state: Vec<f64>,
}

impl Transition {
    pub fn from_record(record: &StepRecord, k_servers: usize) -> Self {
        let (params, action_index) = match record.action.target {
            Placement::Cloud => ([0.0, 0.0], k_servers),
            Placement::Server(k) => ([record.action.d_cpu, record.action.d_mem], k),
        };
        Self {
            state: record.state.clone(),
            action_index,
            params,
            reward: -record.cost_psi,
            next_state: record.next_state.clone(),
        }
    }
}

/// Fixed-capacity ring buffer with uniform sampling.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            items: Vec::with_capacity(capacity.min(1 << 16)),
            cursor: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Appends, overwriting the oldest entry once full.
    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// `n` draws with replacement, uniform over the current contents.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<&Transition> {
        assert!(!self.items.is_empty(), "sampling from an empty buffer");
        (0..n)
            .map(|_| &self.items[rng.random_range(0..self.items.len())])
            .collect()
    }
}
