//! Elastic operating range and the piecewise-linear QoS curve.

use super::model::VnfSpec;

/// Operating range of an instance serving `users` users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceRange {
    pub c_low: f64,
    pub c_up: f64,
    pub m_low: f64,
    pub m_up: f64,
}

impl ResourceRange {
    pub fn r_low(&self) -> f64 {
        self.c_low + self.m_low
    }

    pub fn r_up(&self) -> f64 {
        self.c_up + self.m_up
    }
}

pub fn resource_range(spec: &VnfSpec, users: f64) -> ResourceRange {
    ResourceRange {
        c_low: spec.c0 + (spec.cr - spec.dc) * users,
        c_up: spec.c0 + (spec.cr + spec.dc) * users,
        m_low: spec.m0 + (spec.mr - spec.dm) * users,
        m_up: spec.m0 + (spec.mr + spec.dm) * users,
    }
}

/// QoS shared by the `users` users of an instance holding `cpu` and `mem`.
///
/// Saturates at `qos_max` strictly above both upper bounds, drops to zero
/// strictly below either lower bound, and interpolates linearly in the capped
/// resource sum otherwise. The linear branch is written relative to the lower
/// corner so that it evaluates to exactly `qos_min` there.
pub fn qos(spec: &VnfSpec, users: f64, cpu: f64, mem: f64) -> f64 {
    let range = resource_range(spec, users);
    if cpu > range.c_up && mem > range.m_up {
        return spec.qos_max;
    }
    if cpu < range.c_low || mem < range.m_low {
        return 0.0;
    }
    let span = range.r_up() - range.r_low();
    if span <= 0.0 {
        // Degenerate range (no elasticity): any admissible allocation is at
        // the saturation point.
        return spec.qos_max;
    }
    let r = mem.min(range.m_up) + cpu.min(range.c_up);
    let v = spec.qos_min + (spec.qos_max - spec.qos_min) * (r - range.r_low()) / span;
    v.clamp(0.0, spec.qos_max)
}
