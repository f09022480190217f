//! Oracles shared by the integration suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vnf_lab::nn::{Head, Matrix, Mlp};
use vnf_lab::sim::VnfSpec;

pub const FD_STEP: f64 = 1e-5;
pub const FD_REL_TOL: f64 = 1e-4;
/// Gradients smaller than this are compared on an absolute scale.
const FD_FLOOR: f64 = 1e-6;
/// Rounding error of one objective evaluation, in units of machine epsilon
/// times its magnitude.
const ROUNDING_ULPS: f64 = 8.0;
/// Probes whose hidden pre-activations lie this close to the rectifier kink
/// are skipped; a central difference straddling the kink is meaningless.
const KINK_MARGIN: f64 = 1e-3;

#[derive(Debug, Default, Clone, Copy)]
pub struct FdReport {
    pub probes: usize,
    pub failures: usize,
    pub worst: f64,
}

impl FdReport {
    /// `scale` is the magnitude of the differenced objective values; below
    /// their rounding resolution a central difference carries no signal.
    fn record(&mut self, analytic: f64, numeric: f64, scale: f64) {
        let resolution = ROUNDING_ULPS * f64::EPSILON * scale / FD_STEP;
        let floor = FD_FLOOR.max(resolution / FD_REL_TOL);
        let err = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor);
        self.probes += 1;
        self.worst = self.worst.max(err);
        if err > FD_REL_TOL {
            self.failures += 1;
        }
    }

    pub fn merge(self, o: Self) -> Self {
        Self {
            probes: self.probes + o.probes,
            failures: self.failures + o.failures,
            worst: self.worst.max(o.worst),
        }
    }
}

fn near_kink(net: &Mlp, x: &Matrix) -> bool {
    let cache = net.forward(x);
    let pre = cache.pre_activations();
    pre[..pre.len() - 1]
        .iter()
        .any(|z| z.data().iter().any(|v| v.abs() < KINK_MARGIN))
}

/// `sum(g * net(x))`, the scalar whose gradients are probed.
fn objective(net: &Mlp, x: &Matrix, g: &Matrix) -> f64 {
    let out = net.forward(x).output;
    out.data().iter().zip(g.data()).map(|(a, b)| a * b).sum()
}

/// Central-difference check of parameter and input gradients of `net` on
/// `samples` random single-sample inputs.
pub fn check_network(net: &Mlp, samples: usize, params_per_sample: usize, rng: &mut ChaCha8Rng) -> FdReport {
    let mut report = FdReport::default();
    let n_in = net.input_dim();
    let n_out = net.output_dim();
    let mut done = 0;
    while done < samples {
        let x = Matrix::from_vec(1, n_in, (0..n_in).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        if near_kink(net, &x) {
            continue;
        }
        let g = Matrix::from_vec(1, n_out, (0..n_out).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let cache = net.forward(&x);
        let (grads, dx) = net.backprop(&cache, &g, true, true);
        let grads = grads.unwrap();
        let dx = dx.unwrap();

        for i in 0..n_in {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp.data_mut()[i] += FD_STEP;
            xm.data_mut()[i] -= FD_STEP;
            if near_kink(net, &xp) || near_kink(net, &xm) {
                continue;
            }
            let (fp, fm) = (objective(net, &xp, &g), objective(net, &xm, &g));
            report.record(dx.data()[i], (fp - fm) / (2.0 * FD_STEP), fp.abs().max(fm.abs()));
        }

        let flat: Vec<f64> = grads.iter().copied().collect();
        for _ in 0..params_per_sample {
            let p = rng.random_range(0..flat.len());
            let perturbed = |delta: f64| {
                let mut n = net.clone();
                let mut k = p;
                for s in n.param_slices_mut() {
                    if k < s.len() {
                        s[k] += delta;
                        break;
                    }
                    k -= s.len();
                }
                n
            };
            let (np, nm) = (perturbed(FD_STEP), perturbed(-FD_STEP));
            if near_kink(&np, &x) || near_kink(&nm, &x) {
                continue;
            }
            let (fp, fm) = (objective(&np, &x, &g), objective(&nm, &x, &g));
            report.record(flat[p], (fp - fm) / (2.0 * FD_STEP), fp.abs().max(fm.abs()));
        }
        done += 1;
    }
    report
}

/// The three network shapes used by the learners, on small widths: a linear
/// scoring head, a scaled tanh parameter head, and a critic over a
/// concatenated state, action and parameter input.
pub fn gradient_suite(seed: u64) -> Vec<(&'static str, FdReport)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nets = vec![
        ("linear", Mlp::new(&[6, 16, 12, 4], Head::Linear).unwrap()),
        ("tanh", Mlp::new(&[10, 16, 12, 2], Head::Tanh { scale: vec![50.0, 30.0] }).unwrap()),
        ("critic", Mlp::new(&[12, 16, 12, 1], Head::Linear).unwrap()),
    ];
    nets.iter_mut()
        .map(|(name, net)| {
            net.xavier_init(None, &mut rng);
            // nonzero biases so that every term of the backward pass matters
            for l in net.layers_mut() {
                l.bias.iter_mut().for_each(|b| *b = rng.random_range(-0.2..0.2));
            }
            (*name, check_network(net, 40, 20, &mut rng))
        })
        .collect()
}

/// Piecewise QoS written directly from its definition.
pub fn qos_oracle(s: &VnfSpec, u: f64, c: f64, m: f64) -> f64 {
    let c_low = s.c0 + (s.cr - s.dc) * u;
    let c_up = s.c0 + (s.cr + s.dc) * u;
    let m_low = s.m0 + (s.mr - s.dm) * u;
    let m_up = s.m0 + (s.mr + s.dm) * u;
    if c > c_up && m > m_up {
        s.qos_max
    } else if c < c_low || m < m_low {
        0.0
    } else {
        let r = c.min(c_up) + m.min(m_up);
        let (lo, hi) = (c_low + m_low, c_up + m_up);
        if hi <= lo {
            return s.qos_max;
        }
        s.qos_min + (s.qos_max - s.qos_min) * (r - lo) / (hi - lo)
    }
}
