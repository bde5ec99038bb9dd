//! A 2-8-1 feed-forward binary classifier trained with Adam.
//!
//! Hidden layer uses Leaky ReLU, the output a sigmoid, and the loss is
//! (optionally weighted) binary cross-entropy. Weights start He-normal,
//! biases zero. Every call to [`Network::train`] takes one full-batch Adam
//! step per epoch on the mean weighted loss.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::stream::Example;

pub const INPUTS: usize = 2;
pub const HIDDEN: usize = 8;
/// W1 (8x2, row-major), b1 (8), W2 (1x8), b2 (1).
pub const PARAM_COUNT: usize = HIDDEN * INPUTS + HIDDEN + HIDDEN + 1;

const W1: usize = 0;
const B1: usize = W1 + HIDDEN * INPUTS;
const W2: usize = B1 + HIDDEN;
const B2: usize = W2 + HIDDEN;

pub const LEAKY_SLOPE: f64 = 0.01;
/// Predicted probabilities are clamped to `[EPS_P, 1 - EPS_P]` inside the loss.
pub const EPS_P: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

pub type Gradient = [f64; PARAM_COUNT];

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    params: [f64; PARAM_COUNT],
    m: [f64; PARAM_COUNT],
    v: [f64; PARAM_COUNT],
    steps: u64,
    leaky_slope: f64,
    adam: AdamConfig,
}

/// Examples paired with positive per-example loss multipliers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainBatch {
    inputs: Vec<([f64; 2], u8)>,
    weights: Vec<f64>,
}

impl TrainBatch {
    pub fn new(inputs: Vec<([f64; 2], u8)>, weights: Vec<f64>) -> Result<Self> {
        if inputs.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} examples but {} weights",
                inputs.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "example weight {w} is not positive"
            )));
        }
        Ok(TrainBatch { inputs, weights })
    }

    /// Unit-weight batch.
    pub fn unit<'a, I>(examples: I) -> Self
    where
        I: IntoIterator<Item = &'a Example>,
    {
        let inputs: Vec<_> = examples.into_iter().map(|e| (e.x, e.y)).collect();
        let weights = vec![1.0; inputs.len()];
        TrainBatch { inputs, weights }
    }

    pub fn single(x: [f64; 2], y: u8, weight: f64) -> Result<Self> {
        TrainBatch::new(vec![(x, y)], vec![weight])
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], u8, f64)> + '_ {
        self.inputs
            .iter()
            .zip(&self.weights)
            .map(|(&(x, y), &w)| (x, y, w))
    }
}

pub fn leaky_relu(z: f64, slope: f64) -> f64 {
    if z >= 0.0 {
        z
    } else {
        slope * z
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Weighted binary cross-entropy with the probability clamped away from 0 and 1.
pub fn loss(y: u8, p: f64, weight: f64) -> f64 {
    let p = p.clamp(EPS_P, 1.0 - EPS_P);
    let y = f64::from(y);
    -weight * (y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

impl Network {
    /// He-normal weights, zero biases, fresh Adam state.
    pub fn init(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layer1 = Normal::new(0.0, (2.0 / INPUTS as f64).sqrt()).expect("valid std");
        let layer2 = Normal::new(0.0, (2.0 / HIDDEN as f64).sqrt()).expect("valid std");
        let mut params = [0.0; PARAM_COUNT];
        for w in &mut params[W1..B1] {
            *w = layer1.sample(&mut rng);
        }
        for w in &mut params[W2..B2] {
            *w = layer2.sample(&mut rng);
        }
        Network::from_params(params)
    }

    /// Network with the given parameters and fresh Adam state.
    pub fn from_params(params: [f64; PARAM_COUNT]) -> Self {
        Network {
            params,
            m: [0.0; PARAM_COUNT],
            v: [0.0; PARAM_COUNT],
            steps: 0,
            leaky_slope: LEAKY_SLOPE,
            adam: AdamConfig::default(),
        }
    }

    pub fn with_adam(mut self, adam: AdamConfig) -> Self {
        self.adam = adam;
        self
    }

    pub fn params(&self) -> &[f64; PARAM_COUNT] {
        &self.params
    }

    pub fn leaky_slope(&self) -> f64 {
        self.leaky_slope
    }

    /// Number of Adam steps applied since initialization.
    pub fn optimizer_steps(&self) -> u64 {
        self.steps
    }

    pub fn w1(&self, hidden: usize, input: usize) -> f64 {
        self.params[W1 + hidden * INPUTS + input]
    }

    pub fn b1(&self, hidden: usize) -> f64 {
        self.params[B1 + hidden]
    }

    pub fn w2(&self, hidden: usize) -> f64 {
        self.params[W2 + hidden]
    }

    pub fn b2(&self) -> f64 {
        self.params[B2]
    }

    fn hidden_preactivations(&self, x: [f64; 2]) -> [f64; HIDDEN] {
        let mut z = [0.0; HIDDEN];
        for (h, zh) in z.iter_mut().enumerate() {
            let row = W1 + h * INPUTS;
            *zh = self.params[row] * x[0] + self.params[row + 1] * x[1] + self.params[B1 + h];
        }
        z
    }

    /// Probability of the positive class.
    pub fn forward(&self, x: [f64; 2]) -> f64 {
        let z = self.hidden_preactivations(x);
        let out = z.iter().enumerate().fold(self.params[B2], |acc, (h, &zh)| {
            acc + self.params[W2 + h] * leaky_relu(zh, self.leaky_slope)
        });
        sigmoid(out)
    }

    /// Mean weighted loss over the batch.
    pub fn batch_loss(&self, batch: &TrainBatch) -> f64 {
        if batch.is_empty() {
            return 0.0;
        }
        let total: f64 = batch
            .iter()
            .map(|(x, y, w)| loss(y, self.forward(x), w))
            .sum();
        total / batch.len() as f64
    }

    /// Gradient of [`Network::batch_loss`] with respect to every parameter.
    pub fn gradient(&self, batch: &TrainBatch) -> Gradient {
        let mut grad = [0.0; PARAM_COUNT];
        if batch.is_empty() {
            return grad;
        }
        let scale = 1.0 / batch.len() as f64;
        for (x, y, w) in batch.iter() {
            let z = self.hidden_preactivations(x);
            let mut a = [0.0; HIDDEN];
            let mut out = self.params[B2];
            for h in 0..HIDDEN {
                a[h] = leaky_relu(z[h], self.leaky_slope);
                out += self.params[W2 + h] * a[h];
            }
            let p = sigmoid(out);
            // The clamp makes the loss flat outside [EPS_P, 1 - EPS_P].
            if !(EPS_P..=1.0 - EPS_P).contains(&p) {
                continue;
            }
            let d_out = scale * w * (p - f64::from(y));
            grad[B2] += d_out;
            for h in 0..HIDDEN {
                grad[W2 + h] += d_out * a[h];
                let slope = if z[h] >= 0.0 { 1.0 } else { self.leaky_slope };
                let d_z = d_out * self.params[W2 + h] * slope;
                grad[B1 + h] += d_z;
                grad[W1 + h * INPUTS] += d_z * x[0];
                grad[W1 + h * INPUTS + 1] += d_z * x[1];
            }
        }
        grad
    }

    /// Applies one bias-corrected Adam step.
    pub fn adam_step(&mut self, grad: &Gradient) -> Result<()> {
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NumericalFailure(format!(
                "non-finite gradient for parameter {i}"
            )));
        }
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.adam;
        let t = (self.steps + 1) as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        let mut next = self.params;
        for i in 0..PARAM_COUNT {
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * grad[i];
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            next[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
        if next.iter().any(|p| !p.is_finite()) {
            return Err(Error::NumericalFailure(
                "parameter update is not finite".into(),
            ));
        }
        self.params = next;
        self.steps += 1;
        Ok(())
    }

    /// `epochs` full-batch Adam steps on the mean weighted loss of `batch`.
    pub fn train(&mut self, batch: &TrainBatch, epochs: usize) -> Result<()> {
        if epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be positive".into()));
        }
        if batch.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot train on an empty batch".into(),
            ));
        }
        for _ in 0..epochs {
            let grad = self.gradient(batch);
            self.adam_step(&grad)?;
        }
        Ok(())
    }

    /// Debug dump: one `layer,row,col,value` line per parameter.
    pub fn write_params<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for h in 0..HIDDEN {
            for i in 0..INPUTS {
                writeln!(out, "w1,{h},{i},{:?}", self.w1(h, i))?;
            }
        }
        for h in 0..HIDDEN {
            writeln!(out, "b1,{h},0,{:?}", self.b1(h))?;
        }
        for h in 0..HIDDEN {
            writeln!(out, "w2,0,{h},{:?}", self.w2(h))?;
        }
        writeln!(out, "b2,0,0,{:?}", self.b2())
    }
}
