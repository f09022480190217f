//! Dense networks with hand-written forward and backward passes.

mod adam;
mod matrix;
mod mlp;

pub use adam::Adam;
pub use matrix::Matrix;
pub use mlp::{leaky_relu, soft_update, Dense, ForwardCache, Gradients, Head, Mlp, LEAKY_SLOPE};

use crate::error::{Error, Result};

/// Writes a network as a JSON checkpoint (layer list with dimensions,
/// row-major weights and biases, plus the head).
pub fn save_mlp(mlp: &Mlp) -> Result<String> {
    Ok(serde_json::to_string(mlp)?)
}

pub fn load_mlp(text: &str) -> Result<Mlp> {
    let m: Mlp = serde_json::from_str(text)?;
    let layers = m.layers();
    if layers.is_empty() {
        return Err(Error::Checkpoint("network without layers".into()));
    }
    for w in layers.windows(2) {
        if w[0].outputs() != w[1].inputs() {
            return Err(Error::Checkpoint("incompatible consecutive layers".into()));
        }
    }
    if layers.iter().any(|l| l.bias.len() != l.outputs()) {
        return Err(Error::Checkpoint("bias length mismatch".into()));
    }
    Ok(m)
}

/// Standard deviation used when initializing every network.
pub const INIT_STD: f64 = 1e-2;

/// Hidden widths shared by all actor and critic networks.
pub const HIDDEN: [usize; 2] = [128, 64];

/// `input -> 128 -> 64 -> output`.
pub fn standard_mlp(input: usize, output: usize, head: Head) -> Result<Mlp> {
    Mlp::new(&[input, HIDDEN[0], HIDDEN[1], output], head)
}
