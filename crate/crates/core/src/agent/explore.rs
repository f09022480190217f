use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Value that decreases by a fixed amount per step down to a floor. The
/// value is recomputed from the step count, so it never accumulates
/// rounding drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearDecay {
    pub value: f64,
    pub start: f64,
    pub min: f64,
    pub decay: f64,
    pub steps: u64,
}

impl LinearDecay {
    pub fn new(value: f64, min: f64, decay: f64) -> Self {
        Self {
            value,
            start: value,
            min,
            decay,
            steps: 0,
        }
    }

    pub fn step(&mut self) {
        self.steps += 1;
        self.value = Self::after(self.start, self.min, self.decay, self.steps);
    }

    /// Value after `n` steps from `start`.
    pub fn after(start: f64, min: f64, decay: f64, n: u64) -> f64 {
        (start - n as f64 * decay).max(min)
    }
}

/// Componentwise `clip(N(0, sigma^2) * scale, -c * scale, c * scale)`.
pub fn clipped_noise<R: Rng + ?Sized>(sigma: f64, clip: f64, scale: [f64; 2], rng: &mut R) -> [f64; 2] {
    let mut w = [0.0; 2];
    if sigma <= 0.0 {
        return w;
    }
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    for (wi, s) in w.iter_mut().zip(scale) {
        let bound = clip * s;
        *wi = (normal.sample(rng) * s).clamp(-bound, bound);
    }
    w
}

/// Clips deltas into `[-scale, scale]` componentwise.
pub fn clip_to_box(p: [f64; 2], scale: [f64; 2]) -> [f64; 2] {
    [p[0].clamp(-scale[0], scale[0]), p[1].clamp(-scale[1], scale[1])]
}
