use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::matrix::{axpy, axpy4, dot, dot4, Matrix};
use crate::error::{Error, Result};

/// Negative slope of the hidden leaky rectifier.
pub const LEAKY_SLOPE: f64 = 0.01;

#[inline]
pub fn leaky_relu(x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        LEAKY_SLOPE * x
    }
}

#[inline]
fn leaky_relu_grad(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

/// Output transform of the last layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Head {
    Linear,
    /// `scale[i] * tanh(z[i])`.
    Tanh { scale: Vec<f64> },
}

/// Fully connected layer; `weights` is `outputs x inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    /// `x W^T + b` for a batch `x`.
    fn affine(&self, x: &Matrix) -> Matrix {
        let mut z = Matrix::zeros(x.rows(), self.outputs());
        for b in 0..x.rows() {
            let xr = x.row(b);
            let zr = z.row_mut(b);
            let n_out = zr.len();
            let blocked = n_out - n_out % 4;
            for o in (0..blocked).step_by(4) {
                let w = &self.weights;
                let d = dot4(xr, [w.row(o), w.row(o + 1), w.row(o + 2), w.row(o + 3)]);
                for i in 0..4 {
                    zr[o + i] = self.bias[o + i] + d[i];
                }
            }
            for o in blocked..n_out {
                zr[o] = self.bias[o] + dot(xr, self.weights.row(o));
            }
        }
        z
    }
}

/// Multilayer perceptron with leaky-rectifier hidden layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Dense>,
    head: Head,
}

/// Activations retained by [`Mlp::forward`] for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input of each layer.
    inputs: Vec<Matrix>,
    /// Pre-activation of each layer.
    pre: Vec<Matrix>,
    pub output: Matrix,
}

/// Parameter gradients, shaped like the network (weights then bias, per layer).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub slices: Vec<Vec<f64>>,
}

impl ForwardCache {
    /// Pre-activation of each layer, input layer first.
    pub fn pre_activations(&self) -> &[Matrix] {
        &self.pre
    }
}

impl Gradients {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        Self {
            slices: mlp.param_slices().map(|s| vec![0.0; s.len()]).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.slices.iter().flatten()
    }

    pub fn scale(&mut self, k: f64) {
        self.slices.iter_mut().flatten().for_each(|g| *g *= k);
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(|g| *g == 0.0)
    }
}

impl Mlp {
    /// Zero-initialized network with layer widths `sizes` (input first).
    pub fn new(sizes: &[usize], head: Head) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Shape("an MLP needs at least input and output widths".into()));
        }
        let out = *sizes.last().unwrap();
        if let Head::Tanh { scale } = &head {
            if scale.len() != out || scale.iter().any(|s| !(*s > 0.0)) {
                return Err(Error::Shape("tanh scale must be positive, one per output".into()));
            }
        }
        let layers = sizes
            .windows(2)
            .map(|w| Dense {
                weights: Matrix::zeros(w[1], w[0]),
                bias: vec![0.0; w[1]],
            })
            .collect();
        Ok(Self { layers, head })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn head(&self) -> &Head {
        &self.head
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().outputs()
    }

    pub fn param_count(&self) -> usize {
        self.param_slices().map(<[f64]>::len).sum()
    }

    pub fn param_slices(&self) -> impl Iterator<Item = &[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.data(), l.bias.as_slice()])
    }

    pub fn param_slices_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.data_mut(), l.bias.as_mut_slice()])
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.param_slices().flatten()
    }

    pub fn same_shape(&self, other: &Mlp) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.inputs() == b.inputs() && a.outputs() == b.outputs())
            && self.head == other.head
    }

    /// Gaussian Xavier initialization with zero biases.
    ///
    /// Weights of each layer are drawn from `N(0, 2 / (fan_in + fan_out))`;
    /// when `std` is given the draw is rescaled to that standard deviation.
    pub fn xavier_init<R: Rng + ?Sized>(&mut self, std: Option<f64>, rng: &mut R) {
        for layer in &mut self.layers {
            let xavier = (2.0 / (layer.inputs() + layer.outputs()) as f64).sqrt();
            let normal = Normal::new(0.0, xavier).expect("positive std");
            let rescale = std.map_or(1.0, |s| s / xavier);
            for w in layer.weights.data_mut() {
                *w = normal.sample(rng) * rescale;
            }
            layer.bias.iter_mut().for_each(|b| *b = 0.0);
        }
    }

    /// Batched forward pass; rows of `x` are samples.
    pub fn forward(&self, x: &Matrix) -> ForwardCache {
        assert_eq!(x.cols(), self.input_dim(), "input width");
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut a = x.clone();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let z = layer.affine(&a);
            let next = if l < last {
                let mut h = z.clone();
                h.data_mut().iter_mut().for_each(|v| *v = leaky_relu(*v));
                h
            } else {
                self.apply_head(&z)
            };
            inputs.push(a);
            pre.push(z);
            a = next;
        }
        ForwardCache {
            inputs,
            pre,
            output: a,
        }
    }

    /// Forward pass for a single sample.
    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        self.forward(&Matrix::row_vector(x)).output.into_data()
    }

    fn apply_head(&self, z: &Matrix) -> Matrix {
        match &self.head {
            Head::Linear => z.clone(),
            Head::Tanh { scale } => {
                let mut y = z.clone();
                for r in 0..y.rows() {
                    for (v, s) in y.row_mut(r).iter_mut().zip(scale) {
                        *v = s * v.tanh();
                    }
                }
                y
            }
        }
    }

    /// Gradient of the loss with respect to the last pre-activation.
    fn head_grad(&self, cache: &ForwardCache, grad_out: &Matrix) -> Matrix {
        let z = cache.pre.last().unwrap();
        let mut g = grad_out.clone();
        if let Head::Tanh { scale } = &self.head {
            for r in 0..g.rows() {
                let zr = z.row(r);
                for ((gv, s), zv) in g.row_mut(r).iter_mut().zip(scale).zip(zr) {
                    let t = zv.tanh();
                    *gv *= s * (1.0 - t * t);
                }
            }
        }
        g
    }

    /// Backpropagates `grad_out` (d loss / d output, one row per sample),
    /// returning parameter gradients and/or the input gradient.
    pub fn backprop(
        &self,
        cache: &ForwardCache,
        grad_out: &Matrix,
        want_params: bool,
        want_input: bool,
    ) -> (Option<Gradients>, Option<Matrix>) {
        assert_eq!(grad_out.rows(), cache.output.rows(), "batch size");
        assert_eq!(grad_out.cols(), self.output_dim(), "output width");
        let mut grads = want_params.then(|| Gradients::zeros_like(self));
        let mut delta = self.head_grad(cache, grad_out);
        let batch = delta.rows();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let x = &cache.inputs[l];
            if let Some(g) = grads.as_mut() {
                let (gw, rest) = g.slices[2 * l..].split_at_mut(1);
                let gw = &mut gw[0];
                let gb = &mut rest[0];
                let n_in = layer.inputs();
                let blocked = batch - batch % 4;
                for b in (0..blocked).step_by(4) {
                    let xs = [x.row(b), x.row(b + 1), x.row(b + 2), x.row(b + 3)];
                    for o in 0..layer.outputs() {
                        let d = [
                            delta.get(b, o),
                            delta.get(b + 1, o),
                            delta.get(b + 2, o),
                            delta.get(b + 3, o),
                        ];
                        axpy4(d, xs, &mut gw[o * n_in..(o + 1) * n_in]);
                        gb[o] += (d[0] + d[1]) + (d[2] + d[3]);
                    }
                }
                for b in blocked..batch {
                    let xr = x.row(b);
                    for (o, &d) in delta.row(b).iter().enumerate() {
                        axpy(d, xr, &mut gw[o * n_in..(o + 1) * n_in]);
                        gb[o] += d;
                    }
                }
            }
            if l == 0 && !want_input {
                break;
            }
            let mut dx = Matrix::zeros(batch, layer.inputs());
            for b in 0..batch {
                let dr = dx.row_mut(b);
                let drow = delta.row(b);
                let w = &layer.weights;
                let blocked = drow.len() - drow.len() % 4;
                for o in (0..blocked).step_by(4) {
                    let d = [drow[o], drow[o + 1], drow[o + 2], drow[o + 3]];
                    axpy4(d, [w.row(o), w.row(o + 1), w.row(o + 2), w.row(o + 3)], dr);
                }
                for (o, &d) in drow.iter().enumerate().skip(blocked) {
                    axpy(d, w.row(o), dr);
                }
            }
            if l > 0 {
                let z = &cache.pre[l - 1];
                for (v, zv) in dx.data_mut().iter_mut().zip(z.data()) {
                    *v *= leaky_relu_grad(*zv);
                }
            }
            delta = dx;
        }
        (grads, want_input.then_some(delta))
    }

    /// Parameter gradients for `grad_out`.
    pub fn backward(&self, cache: &ForwardCache, grad_out: &Matrix) -> Gradients {
        self.backprop(cache, grad_out, true, false).0.unwrap()
    }

    /// Gradient with respect to the network input for `grad_out`.
    pub fn input_grad(&self, cache: &ForwardCache, grad_out: &Matrix) -> Matrix {
        self.backprop(cache, grad_out, false, true).1.unwrap()
    }

    pub fn copy_from(&mut self, source: &Mlp) -> Result<()> {
        if !self.same_shape(source) {
            return Err(Error::Shape("copy between differently shaped networks".into()));
        }
        self.clone_from(source);
        Ok(())
    }
}

/// Polyak averaging: `target = tau * source + (1 - tau) * target`.
pub fn soft_update(target: &mut Mlp, source: &Mlp, tau: f64) -> Result<()> {
    if !target.same_shape(source) {
        return Err(Error::Shape("soft update between differently shaped networks".into()));
    }
    for (t, s) in target.param_slices_mut().zip(source.param_slices()) {
        for (tv, sv) in t.iter_mut().zip(s) {
            *tv = tau * sv + (1.0 - tau) * *tv;
        }
    }
    Ok(())
}
