use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regular lattice of `(d_cpu, d_mem)` cells over a symmetric delta box.
///
/// Each axis of width `span` is cut into `floor(span / resolution)` cells of
/// width `resolution`, centred on zero; actions are the cell centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedGrid {
    resolution: f64,
    cpu: Vec<f64>,
    mem: Vec<f64>,
}

fn axis(span: f64, resolution: f64) -> Vec<f64> {
    let half = resolution * (span / 2.0 / resolution).floor();
    let cells = (2.0 * half / resolution).round() as usize;
    (0..cells)
        .map(|i| -half + resolution * (i as f64 + 0.5))
        .collect()
}

impl DiscretizedGrid {
    pub fn new(span_cpu: f64, span_mem: f64, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::validation("grid resolution must be positive"));
        }
        let (cpu, mem) = (axis(span_cpu, resolution), axis(span_mem, resolution));
        if cpu.is_empty() || mem.is_empty() {
            return Err(Error::validation(format!(
                "resolution {resolution} leaves no cells in a {span_cpu} x {span_mem} span"
            )));
        }
        Ok(Self {
            resolution,
            cpu,
            mem,
        })
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.cpu.len() * self.mem.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Deltas of cell `index` (CPU-major).
    pub fn delta(&self, index: usize) -> [f64; 2] {
        let n = self.mem.len();
        [self.cpu[index / n], self.mem[index % n]]
    }

    /// Cell containing `p`, clamped to the lattice.
    pub fn nearest(&self, p: [f64; 2]) -> usize {
        let pick = |values: &[f64], x: f64| {
            let lo = values[0] - self.resolution / 2.0;
            let i = ((x - lo) / self.resolution).floor();
            (i.max(0.0) as usize).min(values.len() - 1)
        };
        pick(&self.cpu, p[0]) * self.mem.len() + pick(&self.mem, p[1])
    }
}
