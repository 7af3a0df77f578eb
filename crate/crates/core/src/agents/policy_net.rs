//! A small fully connected Q-value network trained by plain stochastic
//! gradient descent on the squared Bellman error, with a frozen target copy.
//!
//! Architecture: input → 128 → 128 → n_actions, ReLU on the two hidden
//! layers, linear output. States enter either as a one-hot vector over
//! registry indices (the default) or as the flattened real/imaginary parts
//! of the state value (the alternative dense encoding).

use std::collections::HashMap;

use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HIDDEN_WIDTH: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    OneHot,
    Amplitude,
}

/// How a state is presented to the network.
#[derive(Clone, Copy, Debug)]
pub enum Features<'a> {
    OneHot(usize),
    Dense(&'a [f64]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Layer {
    in_dim: usize,
    out_dim: usize,
    /// Row-major over inputs: `weights[i*out_dim + j]` connects input i to
    /// output j, so both forward passes and one-hot row selection stream
    /// contiguous memory.
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Layer {
    fn init<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound);
        Layer {
            in_dim,
            out_dim,
            weights: (0..in_dim * out_dim).map(|_| dist.sample(rng)).collect(),
            biases: (0..out_dim).map(|_| dist.sample(rng)).collect(),
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.out_dim..(i + 1) * self.out_dim]
    }

    /// out = biases + xᵀ·W, skipping zero inputs.
    fn forward_dense(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(&self.biases);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                for (o, &w) in out.iter_mut().zip(self.row(i)) {
                    *o += xi * w;
                }
            }
        }
    }

    /// out = biases + W[row], the one-hot fast path.
    fn forward_one_hot(&self, row: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(&self.biases);
        for (o, &w) in out.iter_mut().zip(self.row(row)) {
            *o += w;
        }
    }
}

fn relu_in_place(v: &mut [f64]) {
    for x in v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// Accumulated parameter gradients for one batch. Hidden-layer weight
/// gradients are dense; the (potentially huge) input-layer weight gradient
/// is kept as the set of rows actually touched by the batch.
struct Grads {
    db: [Vec<f64>; 3],
    dw0_rows: HashMap<usize, Vec<f64>>,
    dw1: Vec<f64>,
    dw2: Vec<f64>,
}

/// One transition prepared for a gradient step. `next_state` is `None` for
/// terminal transitions (their future term is zero). `next_max_hint`, when
/// present, must equal the target network's maximum Q-value at `next_state`;
/// it exists so training loops can memoize target evaluations between target
/// updates.
#[derive(Clone, Copy, Debug)]
pub struct BatchTransition<'a> {
    pub state: Features<'a>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Option<Features<'a>>,
    pub next_max_hint: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetUpdateMode {
    Hard,
    Soft(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyNet {
    layers: Vec<Layer>,
    target: Vec<Layer>,
    encoding: Encoding,
    input_dim: usize,
    hidden: usize,
    n_actions: usize,
}

impl PolicyNet {
    pub fn new<R: Rng>(input_dim: usize, n_actions: usize, encoding: Encoding, rng: &mut R) -> Self {
        Self::with_hidden(input_dim, HIDDEN_WIDTH, n_actions, encoding, rng)
    }

    pub fn with_hidden<R: Rng>(
        input_dim: usize,
        hidden: usize,
        n_actions: usize,
        encoding: Encoding,
        rng: &mut R,
    ) -> Self {
        assert!(input_dim > 0 && hidden > 0 && n_actions > 0);
        let layers = vec![
            Layer::init(input_dim, hidden, rng),
            Layer::init(hidden, hidden, rng),
            Layer::init(hidden, n_actions, rng),
        ];
        let target = layers.clone();
        PolicyNet { layers, target, encoding, input_dim, hidden, n_actions }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_width(&self) -> usize {
        self.hidden
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    fn check_features(&self, feat: Features<'_>) -> Result<()> {
        match feat {
            Features::OneHot(index) => {
                if index >= self.input_dim {
                    return Err(Error::StateIndexOutOfRange { index, dim: self.input_dim });
                }
            }
            Features::Dense(x) => {
                if x.len() != self.input_dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.input_dim,
                        found: x.len(),
                    });
                }
            }
        }
        Ok(())
    }

    fn stack_forward(
        &self,
        stack: &[Layer],
        feat: Features<'_>,
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        self.check_features(feat)?;
        let mut h1 = Vec::with_capacity(self.hidden);
        match feat {
            Features::OneHot(index) => stack[0].forward_one_hot(index, &mut h1),
            Features::Dense(x) => stack[0].forward_dense(x, &mut h1),
        }
        relu_in_place(&mut h1);
        let mut h2 = Vec::with_capacity(self.hidden);
        stack[1].forward_dense(&h1, &mut h2);
        relu_in_place(&mut h2);
        let mut out = Vec::with_capacity(self.n_actions);
        stack[2].forward_dense(&h2, &mut out);
        Ok((h1, h2, out))
    }

    /// Q-values of the policy network.
    pub fn forward(&self, feat: Features<'_>) -> Result<Vec<f64>> {
        Ok(self.stack_forward(&self.layers, feat)?.2)
    }

    /// Q-values of the frozen target network.
    pub fn target_forward(&self, feat: Features<'_>) -> Result<Vec<f64>> {
        Ok(self.stack_forward(&self.target, feat)?.2)
    }

    pub fn target_max(&self, feat: Features<'_>) -> Result<f64> {
        Ok(self.target_forward(feat)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
    }

    fn resolve_targets(&self, batch: &[BatchTransition<'_>], gamma: f64) -> Result<Vec<f64>> {
        batch
            .iter()
            .map(|t| {
                let future = match (t.next_state, t.next_max_hint) {
                    (None, _) => 0.0,
                    (Some(_), Some(hint)) => hint,
                    (Some(next), None) => self.target_max(next)?,
                };
                Ok(t.reward + gamma * future)
            })
            .collect()
    }

    /// Mean squared error of the batch under the current parameters, using
    /// the same target resolution as a training step (no parameter change).
    pub fn loss_on_batch(&self, batch: &[BatchTransition<'_>], gamma: f64) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let targets = self.resolve_targets(batch, gamma)?;
        let mut loss = 0.0;
        for (t, &y) in batch.iter().zip(&targets) {
            let q = self.forward(t.state)?;
            let diff = q[t.action] - y;
            loss += diff * diff;
        }
        Ok(loss / batch.len() as f64)
    }

    fn loss_and_grads(&self, batch: &[BatchTransition<'_>], gamma: f64) -> Result<(f64, Grads)> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let targets = self.resolve_targets(batch, gamma)?;
        let inv_n = 1.0 / batch.len() as f64;
        let (l1, l2) = (&self.layers[1], &self.layers[2]);
        let mut grads = Grads {
            db: [vec![0.0; self.hidden], vec![0.0; self.hidden], vec![0.0; self.n_actions]],
            dw0_rows: HashMap::new(),
            dw1: vec![0.0; self.hidden * self.hidden],
            dw2: vec![0.0; self.hidden * self.n_actions],
        };
        let mut loss = 0.0;
        let mut delta2 = vec![0.0; self.hidden];
        let mut delta1 = vec![0.0; self.hidden];
        for (t, &y) in batch.iter().zip(&targets) {
            let (h1, h2, q) = self.stack_forward(&self.layers, t.state)?;
            let diff = q[t.action] - y;
            loss += diff * diff;
            let g_out = 2.0 * diff * inv_n;

            // output layer: only the selected action's column is involved
            grads.db[2][t.action] += g_out;
            for (j, &h) in h2.iter().enumerate() {
                if h != 0.0 {
                    grads.dw2[j * self.n_actions + t.action] += h * g_out;
                }
                // back through the ReLU: zero where h2 was clipped
                delta2[j] = if h > 0.0 { l2.row(j)[t.action] * g_out } else { 0.0 };
            }

            // second hidden layer
            for (j, &d) in delta2.iter().enumerate() {
                grads.db[1][j] += d;
            }
            for (i, &h) in h1.iter().enumerate() {
                let row = l1.row(i);
                if h > 0.0 {
                    let drow = &mut grads.dw1[i * self.hidden..(i + 1) * self.hidden];
                    let mut dot = 0.0;
                    for ((dw, &d), &w) in drow.iter_mut().zip(&delta2).zip(row) {
                        *dw += h * d;
                        dot += w * d;
                    }
                    delta1[i] = dot;
                } else {
                    delta1[i] = 0.0;
                    if h != 0.0 {
                        // h < 0 cannot occur after ReLU; keep grads exact anyway
                        for (dw, &d) in grads.dw1[i * self.hidden..(i + 1) * self.hidden]
                            .iter_mut()
                            .zip(&delta2)
                        {
                            *dw += h * d;
                        }
                    }
                }
            }

            // first layer
            for (i, &d) in delta1.iter().enumerate() {
                grads.db[0][i] += d;
            }
            match t.state {
                Features::OneHot(index) => {
                    let row =
                        grads.dw0_rows.entry(index).or_insert_with(|| vec![0.0; self.hidden]);
                    for (dw, &d) in row.iter_mut().zip(&delta1) {
                        *dw += d;
                    }
                }
                Features::Dense(x) => {
                    for (i, &xi) in x.iter().enumerate() {
                        if xi != 0.0 {
                            let row = grads
                                .dw0_rows
                                .entry(i)
                                .or_insert_with(|| vec![0.0; self.hidden]);
                            for (dw, &d) in row.iter_mut().zip(&delta1) {
                                *dw += xi * d;
                            }
                        }
                    }
                }
            }
        }
        Ok((loss * inv_n, grads))
    }

    fn apply_grads(&mut self, grads: &Grads, lr: f64) {
        for (row, g) in &grads.dw0_rows {
            let out_dim = self.layers[0].out_dim;
            let w = &mut self.layers[0].weights[row * out_dim..(row + 1) * out_dim];
            for (w, &g) in w.iter_mut().zip(g) {
                *w -= lr * g;
            }
        }
        for (w, &g) in self.layers[1].weights.iter_mut().zip(&grads.dw1) {
            *w -= lr * g;
        }
        for (w, &g) in self.layers[2].weights.iter_mut().zip(&grads.dw2) {
            *w -= lr * g;
        }
        for (layer, db) in self.layers.iter_mut().zip(&grads.db) {
            for (b, &g) in layer.biases.iter_mut().zip(db) {
                *b -= lr * g;
            }
        }
    }

    /// Flat gradient of the batch loss over all parameters, ordered as
    /// (layer-0 weights, layer-0 biases, layer-1 weights, …). Intended for
    /// verification against finite differences; allocates the full dense
    /// gradient.
    pub fn batch_gradients(&self, batch: &[BatchTransition<'_>], gamma: f64) -> Result<Vec<f64>> {
        let (_, grads) = self.loss_and_grads(batch, gamma)?;
        let mut flat = Vec::with_capacity(self.param_count());
        // layer 0
        let l0 = &self.layers[0];
        let empty = vec![0.0; l0.out_dim];
        for i in 0..l0.in_dim {
            let row = grads.dw0_rows.get(&i).unwrap_or(&empty);
            flat.extend_from_slice(row);
        }
        flat.extend_from_slice(&grads.db[0]);
        flat.extend_from_slice(&grads.dw1);
        flat.extend_from_slice(&grads.db[1]);
        flat.extend_from_slice(&grads.dw2);
        flat.extend_from_slice(&grads.db[2]);
        Ok(flat)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn get_param(&self, index: usize) -> f64 {
        let (layer, offset) = self.locate_param(index);
        let l = &self.layers[layer];
        if offset < l.weights.len() {
            l.weights[offset]
        } else {
            l.biases[offset - l.weights.len()]
        }
    }

    pub fn set_param(&mut self, index: usize, value: f64) {
        let (layer, offset) = self.locate_param(index);
        let l = &mut self.layers[layer];
        if offset < l.weights.len() {
            l.weights[offset] = value;
        } else {
            l.biases[offset - l.weights.len()] = value;
        }
    }

    fn locate_param(&self, mut index: usize) -> (usize, usize) {
        for (li, l) in self.layers.iter().enumerate() {
            let span = l.weights.len() + l.biases.len();
            if index < span {
                return (li, index);
            }
            index -= span;
        }
        panic!("parameter index out of range");
    }

    /// Analytic Jacobian of the Q-values with respect to a dense input:
    /// `jac[k][i] = ∂Q_k/∂x_i`.
    pub fn input_jacobian(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let (h1, h2, _) = self.stack_forward(&self.layers, Features::Dense(x))?;
        let (l0, l1, l2) = (&self.layers[0], &self.layers[1], &self.layers[2]);
        let mut jac = Vec::with_capacity(self.n_actions);
        let mut v2 = vec![0.0; self.hidden];
        let mut v1 = vec![0.0; self.hidden];
        for k in 0..self.n_actions {
            for (j, v) in v2.iter_mut().enumerate() {
                *v = if h2[j] > 0.0 { l2.row(j)[k] } else { 0.0 };
            }
            for (i, v) in v1.iter_mut().enumerate() {
                *v = if h1[i] > 0.0 {
                    l1.row(i).iter().zip(&v2).map(|(&w, &d)| w * d).sum()
                } else {
                    0.0
                };
            }
            let row: Vec<f64> = (0..self.input_dim)
                .map(|i| l0.row(i).iter().zip(&v1).map(|(&w, &d)| w * d).sum())
                .collect();
            jac.push(row);
        }
        Ok(jac)
    }

    pub fn update_target_hard(&mut self) {
        self.target = self.layers.clone();
    }

    /// θ̄ ← (1−τ)·θ̄ + τ·θ elementwise.
    pub fn update_target_soft(&mut self, tau: f64) {
        for (t, l) in self.target.iter_mut().zip(&self.layers) {
            for (tw, &lw) in t.weights.iter_mut().zip(&l.weights) {
                *tw = (1.0 - tau) * *tw + tau * lw;
            }
            for (tb, &lb) in t.biases.iter_mut().zip(&l.biases) {
                *tb = (1.0 - tau) * *tb + tau * lb;
            }
        }
    }

    /// Serializes layer shapes and parameters (policy and target) to JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("policy networks serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let net: PolicyNet = serde_json::from_str(text)
            .map_err(|e| Error::BadArtifact(format!("policy checkpoint: {e}")))?;
        net.validate_shapes()?;
        Ok(net)
    }

    fn validate_shapes(&self) -> Result<()> {
        let bad = |msg: String| Error::BadArtifact(format!("policy checkpoint: {msg}"));
        if self.layers.len() != 3 || self.target.len() != 3 {
            return Err(bad("expected exactly three layers".into()));
        }
        let dims = [
            (self.input_dim, self.hidden),
            (self.hidden, self.hidden),
            (self.hidden, self.n_actions),
        ];
        for (stack_name, stack) in [("policy", &self.layers), ("target", &self.target)] {
            for (l, (in_dim, out_dim)) in stack.iter().zip(dims) {
                if l.in_dim != in_dim
                    || l.out_dim != out_dim
                    || l.weights.len() != in_dim * out_dim
                    || l.biases.len() != out_dim
                {
                    return Err(bad(format!("{stack_name} layer shape mismatch")));
                }
                if l.weights.iter().chain(&l.biases).any(|v| !v.is_finite()) {
                    return Err(bad(format!("{stack_name} contains non-finite parameters")));
                }
            }
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn zero_params(&mut self) {
        for stack in [&mut self.layers, &mut self.target] {
            for l in stack {
                l.weights.iter_mut().for_each(|w| *w = 0.0);
                l.biases.iter_mut().for_each(|b| *b = 0.0);
            }
        }
    }
}

/// One gradient-descent step on the squared Bellman error of the batch.
/// Targets use the frozen copy (`y = r + γ·max Q(s′|θ̄)`, or `y = r` on
/// terminal transitions); only the policy parameters move. Returns the
/// pre-step loss.
pub fn net_train_step(
    net: &mut PolicyNet,
    batch: &[BatchTransition<'_>],
    gamma: f64,
    lr: f64,
) -> Result<f64> {
    let (loss, grads) = net.loss_and_grads(batch, gamma)?;
    net.apply_grads(&grads, lr);
    Ok(loss)
}

/// Copies (hard) or blends (soft) the policy parameters into the target.
pub fn update_target(net: &mut PolicyNet, mode: TargetUpdateMode) {
    match mode {
        TargetUpdateMode::Hard => net.update_target_hard(),
        TargetUpdateMode::Soft(tau) => net.update_target_soft(tau),
    }
}
