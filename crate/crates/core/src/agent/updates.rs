//! Batch assembly and the actor ascent steps shared by the learners.

use crate::error::Result;
use crate::nn::{Adam, Matrix, Mlp};

use super::replay::Transition;

pub fn one_hot(index: usize, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[index] = 1.0;
    v
}

/// Index of the largest value; the first one on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

/// A sampled minibatch laid out as matrices.
#[derive(Debug, Clone)]
pub struct Batch {
    pub states: Matrix,
    pub next_states: Matrix,
    /// One-hot of the taken discrete action.
    pub actions: Matrix,
    pub action_index: Vec<usize>,
    /// Parameters divided by the parameter scale.
    pub params: Matrix,
    pub rewards: Vec<f64>,
}

impl Batch {
    pub fn from_transitions(items: &[&Transition], n_actions: usize, scale: [f64; 2]) -> Result<Self> {
        let states = Matrix::from_rows(&items.iter().map(|t| t.state.as_slice()).collect::<Vec<_>>())?;
        let next_states =
            Matrix::from_rows(&items.iter().map(|t| t.next_state.as_slice()).collect::<Vec<_>>())?;
        let actions = Matrix::from_rows(
            &items
                .iter()
                .map(|t| one_hot(t.action_index, n_actions))
                .collect::<Vec<_>>(),
        )?;
        let params = Matrix::from_rows(
            &items
                .iter()
                .map(|t| [t.params[0] / scale[0], t.params[1] / scale[1]])
                .collect::<Vec<_>>(),
        )?;
        Ok(Self {
            states,
            next_states,
            actions,
            action_index: items.iter().map(|t| t.action_index).collect(),
            params,
            rewards: items.iter().map(|t| t.reward).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// One Adam ascent step of a deterministic parameter actor on
/// `mean_b Q(x_b, actor(x_b))`, where `dq_dp` returns `dQ/dp` for a batch of
/// actor outputs (one row per sample).
pub fn ascend_param_actor<F>(actor: &mut Mlp, adam: &mut Adam, inputs: &Matrix, dq_dp: F) -> Result<()>
where
    F: FnOnce(&Matrix) -> Result<Matrix>,
{
    let cache = actor.forward(inputs);
    let mut g = dq_dp(&cache.output)?;
    let n = inputs.rows() as f64;
    g.data_mut().iter_mut().for_each(|v| *v = -*v / n);
    let grads = actor.backward(&cache, &g);
    adam.step(actor, &grads)
}

/// One Adam ascent step of a discrete actor through a softmax relaxation:
/// `dq_dsoft` maps the batch of softmax outputs to `dQ/d(soft action)`.
pub fn ascend_action_actor<F>(actor: &mut Mlp, adam: &mut Adam, states: &Matrix, dq_dsoft: F) -> Result<()>
where
    F: FnOnce(&Matrix) -> Result<Matrix>,
{
    let cache = actor.forward(states);
    let rows: Vec<Vec<f64>> = (0..cache.output.rows())
        .map(|r| softmax(cache.output.row(r)))
        .collect();
    let soft = Matrix::from_rows(&rows)?;
    let g_soft = dq_dsoft(&soft)?;
    let n = states.rows() as f64;
    let mut g = Matrix::zeros(soft.rows(), soft.cols());
    for r in 0..soft.rows() {
        let s = soft.row(r);
        let gs = g_soft.row(r);
        let inner: f64 = s.iter().zip(gs).map(|(a, b)| a * b).sum();
        for (i, gv) in g.row_mut(r).iter_mut().enumerate() {
            *gv = -s[i] * (gs[i] - inner) / n;
        }
    }
    let grads = actor.backward(&cache, &g);
    adam.step(actor, &grads)
}
