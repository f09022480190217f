use serde::{Deserialize, Serialize};

use super::mlp::{Gradients, Mlp};
use crate::error::{Error, Result};

/// Bias-corrected Adam moments for one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(mlp: &Mlp, lr: f64) -> Self {
        let n = mlp.param_count();
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// One descent step on `mlp` along `grads`.
    pub fn step(&mut self, mlp: &mut Mlp, grads: &Gradients) -> Result<()> {
        let n: usize = grads.slices.iter().map(Vec::len).sum();
        if n != self.m.len() || mlp.param_count() != n {
            return Err(Error::Shape("optimizer state does not match network".into()));
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2) = (self.beta1, self.beta2);
        let mut idx = 0;
        for (p, g) in mlp.param_slices_mut().zip(&grads.slices) {
            for (pv, gv) in p.iter_mut().zip(g) {
                let m = &mut self.m[idx];
                let v = &mut self.v[idx];
                *m = b1 * *m + (1.0 - b1) * gv;
                *v = b2 * *v + (1.0 - b2) * gv * gv;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *pv -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
                idx += 1;
            }
        }
        Ok(())
    }
}
