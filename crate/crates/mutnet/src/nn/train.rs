//! Seeded SGD training and accuracy evaluation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::activation::Activation;
use super::network::{Layer, Network};
use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::rng;

/// Everything that determines a training run. Two equal specs trained on
/// the same dataset produce bit-identical networks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSpec {
    pub hidden_sizes: Vec<usize>,
    pub activations: Vec<Activation>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl TrainingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.activations.len() != self.hidden_sizes.len() {
            return Err(Error::InvalidSpec(format!(
                "activations length {} does not match hidden_sizes length {}",
                self.activations.len(),
                self.hidden_sizes.len()
            )));
        }
        if self.hidden_sizes.contains(&0) {
            return Err(Error::InvalidSpec(
                "hidden layer sizes must be positive".into(),
            ));
        }
        if self.activations.contains(&Activation::SoftmaxOutput) {
            return Err(Error::InvalidSpec(
                "hidden layers cannot use softmax-output".into(),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidSpec("learning_rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidSpec("batch_size must be positive".into()));
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return Err(Error::InvalidSpec("init_scale must be positive".into()));
        }
        Ok(())
    }
}

/// Builds the seeded initial network for `spec` on `input_dim`/`class_count`.
///
/// Weights are uniform in `[-init_scale, init_scale)` drawn from the
/// per-layer "init" stream; biases start at zero.
fn initialize(spec: &TrainingSpec, input_dim: usize, class_count: usize) -> Result<Network> {
    let mut dims = Vec::with_capacity(spec.hidden_sizes.len() + 1);
    let mut prev = input_dim;
    for (&size, &act) in spec.hidden_sizes.iter().zip(&spec.activations) {
        dims.push((prev, size, act));
        prev = size;
    }
    dims.push((prev, class_count, Activation::SoftmaxOutput));

    let layers = dims
        .into_iter()
        .enumerate()
        .map(|(idx, (fan_in, fan_out, act))| {
            let mut r = rng::stream(spec.seed, "init", idx as u64);
            let s = spec.init_scale;
            let weights = (0..fan_out)
                .map(|_| (0..fan_in).map(|_| r.random_range(-s..s)).collect())
                .collect();
            Layer::new(weights, vec![0.0; fan_out], act)
        })
        .collect();
    Network::new(input_dim, class_count, layers)
}

/// Trains a classifier with plain SGD on mean cross-entropy.
///
/// One seeded shuffle per epoch, then in-order mini-batches (the last
/// batch may be short). `epochs == 0` returns the initialized network.
pub fn train(spec: &TrainingSpec, data: &Dataset) -> Result<Network> {
    spec.validate()?;
    let train_rows = data.split_indices(Split::Train);
    if train_rows.is_empty() {
        return Err(Error::EmptySplit(Split::Train));
    }

    let mut net = initialize(spec, data.feature_dim(), data.class_count())?;
    for epoch in 0..spec.epochs {
        let mut order = train_rows.clone();
        order.shuffle(&mut rng::stream(spec.seed, "epoch-shuffle", epoch as u64));
        for chunk in order.chunks(spec.batch_size) {
            let batch: Vec<(&[f64], usize)> = chunk
                .iter()
                .map(|&row| (data.feature(row), data.label(row)))
                .collect();
            let grads = net.gradient(&batch)?;
            net = apply_sgd_step(net, &grads, spec.learning_rate)?;
        }
    }
    Ok(net)
}

fn apply_sgd_step(net: Network, grads: &super::Gradients, lr: f64) -> Result<Network> {
    let mut layers = net.layers().to_vec();
    for (layer, lg) in layers.iter_mut().zip(&grads.layers) {
        for (row, grow) in layer.weights.iter_mut().zip(&lg.weights) {
            for (w, g) in row.iter_mut().zip(grow) {
                *w -= lr * g;
            }
        }
        for (b, g) in layer.biases.iter_mut().zip(&lg.biases) {
            *b -= lr * g;
        }
    }
    net.with_layers(layers)
}

impl Network {
    /// Fraction of the split the network labels correctly.
    pub fn accuracy(&self, data: &Dataset, split: Split) -> Result<f64> {
        let rows = data.split_indices(split);
        if rows.is_empty() {
            return Err(Error::EmptySplit(split));
        }
        let mut correct = 0usize;
        for row in &rows {
            if self.predict_label(data.feature(*row))? == data.label(*row) {
                correct += 1;
            }
        }
        Ok(correct as f64 / rows.len() as f64)
    }
}
