//! Model-level mutation operators applied to trained networks.
//!
//! Four operators, all architecture-preserving:
//!
//! * GF, Gaussian fuzzing: selected weights get additive Gaussian noise
//!   scaled by the owning layer's weight standard deviation.
//! * WS, weight shuffling: selected neurons have their incoming weight
//!   row permuted (bias untouched).
//! * NS, neuron switch: disjoint neuron pairs within a layer swap
//!   incoming rows and biases. Outgoing columns stay put; swapping those
//!   too would produce a functionally identical network.
//! * NAI, neuron activation inverse: selected neurons have incoming row
//!   and bias negated, flipping the pre-activation sign.
//!
//! Element selection depends only on layer shapes and the seed, never on
//! weight values, so NS and NAI are exact involutions under a fixed seed.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Layer, Network};
use crate::rng;

/// Granularity at which an operator selects targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationLevel {
    Weight,
    Neuron,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelMutationKind {
    #[serde(rename = "GF")]
    GaussianFuzz,
    #[serde(rename = "WS")]
    WeightShuffle,
    #[serde(rename = "NS")]
    NeuronSwitch,
    #[serde(rename = "NAI")]
    NeuronActivationInverse,
}

impl ModelMutationKind {
    pub const ALL: [ModelMutationKind; 4] = [
        ModelMutationKind::GaussianFuzz,
        ModelMutationKind::WeightShuffle,
        ModelMutationKind::NeuronSwitch,
        ModelMutationKind::NeuronActivationInverse,
    ];

    pub fn level(self) -> MutationLevel {
        match self {
            ModelMutationKind::GaussianFuzz => MutationLevel::Weight,
            _ => MutationLevel::Neuron,
        }
    }

    pub fn ordinal(self) -> usize {
        Self::ALL
            .iter()
            .position(|&k| k == self)
            .expect("member of ALL")
    }

    pub fn abbreviation(self) -> &'static str {
        match self {
            ModelMutationKind::GaussianFuzz => "GF",
            ModelMutationKind::WeightShuffle => "WS",
            ModelMutationKind::NeuronSwitch => "NS",
            ModelMutationKind::NeuronActivationInverse => "NAI",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMutationSpec {
    pub kind: ModelMutationKind,
    /// Fraction of weights (GF) or neurons (WS/NS/NAI) targeted.
    pub gamma: f64,
    /// Gaussian noise scale; only GF reads it.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_sigma() -> f64 {
    1.0
}

impl ModelMutationSpec {
    pub fn new(kind: ModelMutationKind, gamma: f64, sigma: f64, seed: u64) -> Self {
        ModelMutationSpec {
            kind,
            gamma,
            sigma,
            seed,
        }
    }

    pub fn level(&self) -> MutationLevel {
        self.kind.level()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if self.kind == ModelMutationKind::GaussianFuzz
            && !(self.sigma.is_finite() && self.sigma > 0.0)
        {
            return Err(Error::InvalidSpec(format!(
                "GF sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Replaces the seed, leaving the rest of the template intact.
    pub fn with_seed(&self, seed: u64) -> Self {
        ModelMutationSpec { seed, ..*self }
    }
}

/// Applies one model-level operator, returning a new network.
pub fn apply_model_operator(network: &Network, spec: &ModelMutationSpec) -> Result<Network> {
    spec.validate()?;
    let mut layers = network.layers().to_vec();
    match spec.kind {
        ModelMutationKind::GaussianFuzz => gaussian_fuzz(&mut layers, spec)?,
        ModelMutationKind::WeightShuffle => weight_shuffle(&mut layers, spec)?,
        ModelMutationKind::NeuronSwitch => neuron_switch(&mut layers, spec)?,
        ModelMutationKind::NeuronActivationInverse => activation_inverse(&mut layers, spec)?,
    }
    network.with_layers(layers)
}

/// Flat index of every weight: (layer, row) pairs in declaration order.
fn weight_slots(layers: &[Layer]) -> Vec<(usize, usize, usize)> {
    let mut slots = Vec::new();
    for (l, layer) in layers.iter().enumerate() {
        for o in 0..layer.output_dim() {
            for i in 0..layer.input_dim() {
                slots.push((l, o, i));
            }
        }
    }
    slots
}

/// Flat index of every neuron as (layer, neuron) in declaration order.
fn neuron_slots(layers: &[Layer]) -> Vec<(usize, usize)> {
    let mut slots = Vec::new();
    for (l, layer) in layers.iter().enumerate() {
        for o in 0..layer.output_dim() {
            slots.push((l, o));
        }
    }
    slots
}

fn target_count(total: usize, gamma: f64) -> Result<usize> {
    let count = ((gamma * total as f64).ceil() as usize).min(total);
    if count == 0 {
        return Err(Error::EmptyMutation);
    }
    Ok(count)
}

/// Seeded sample of `count` distinct slot indices, sorted ascending.
fn pick_sorted<R: Rng>(rng: &mut R, total: usize, count: usize) -> Vec<usize> {
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, total, count).into_vec();
    picked.sort_unstable();
    picked
}

/// Population standard deviation of a layer's weights.
fn layer_weight_std(layer: &Layer) -> f64 {
    let n = (layer.output_dim() * layer.input_dim()) as f64;
    let mean: f64 = layer.weights.iter().flatten().sum::<f64>() / n;
    let var: f64 = layer
        .weights
        .iter()
        .flatten()
        .map(|w| (w - mean) * (w - mean))
        .sum::<f64>()
        / n;
    var.sqrt()
}

fn gaussian_fuzz(layers: &mut [Layer], spec: &ModelMutationSpec) -> Result<()> {
    let slots = weight_slots(layers);
    let count = target_count(slots.len(), spec.gamma)?;
    let stds: Vec<f64> = layers.iter().map(layer_weight_std).collect();
    let mut r = rng::stream(spec.seed, "gf", 0);
    let picked = pick_sorted(&mut r, slots.len(), count);
    for idx in picked {
        let (l, o, i) = slots[idx];
        layers[l].weights[o][i] += spec.sigma * stds[l] * rng::standard_normal(&mut r);
    }
    Ok(())
}

fn weight_shuffle(layers: &mut [Layer], spec: &ModelMutationSpec) -> Result<()> {
    let slots = neuron_slots(layers);
    let count = target_count(slots.len(), spec.gamma)?;
    let mut r = rng::stream(spec.seed, "ws", 0);
    let picked = pick_sorted(&mut r, slots.len(), count);
    for idx in picked {
        let (l, o) = slots[idx];
        layers[l].weights[o].shuffle(&mut r);
    }
    Ok(())
}

fn neuron_switch(layers: &mut [Layer], spec: &ModelMutationSpec) -> Result<()> {
    let total_neurons: usize = layers.iter().map(Layer::output_dim).sum();
    let eligible: Vec<usize> = (0..layers.len())
        .filter(|&l| layers[l].output_dim() >= 2)
        .collect();
    if eligible.is_empty() {
        return Err(Error::MutationNotApplicable(
            "neuron switch needs a layer with at least 2 neurons".into(),
        ));
    }
    let requested = target_count(total_neurons, spec.gamma)?.div_ceil(2);
    // a neuron joins at most one pair, so feasibility is bounded per layer
    let feasible: usize = eligible.iter().map(|&l| layers[l].output_dim() / 2).sum();
    let pairs = requested.min(feasible);

    let mut unused: Vec<Vec<usize>> = layers
        .iter()
        .map(|l| (0..l.output_dim()).collect())
        .collect();
    let mut r = rng::stream(spec.seed, "ns", 0);
    for _ in 0..pairs {
        let open: Vec<usize> = eligible
            .iter()
            .copied()
            .filter(|&l| unused[l].len() >= 2)
            .collect();
        let layer = open[r.random_range(0..open.len())];
        let pick = rand::seq::index::sample(&mut r, unused[layer].len(), 2);
        let (pa, pb) = (pick.index(0), pick.index(1));
        let (a, b) = (unused[layer][pa], unused[layer][pb]);
        // remove the higher position first so the lower stays valid
        let (hi, lo) = (pa.max(pb), pa.min(pb));
        unused[layer].remove(hi);
        unused[layer].remove(lo);

        layers[layer].weights.swap(a, b);
        layers[layer].biases.swap(a, b);
    }
    Ok(())
}

fn activation_inverse(layers: &mut [Layer], spec: &ModelMutationSpec) -> Result<()> {
    let slots = neuron_slots(layers);
    let count = target_count(slots.len(), spec.gamma)?;
    let mut r = rng::stream(spec.seed, "nai", 0);
    let picked = pick_sorted(&mut r, slots.len(), count);
    for idx in picked {
        let (l, o) = slots[idx];
        for w in &mut layers[l].weights[o] {
            *w = -*w;
        }
        layers[l].biases[o] = -layers[l].biases[o];
    }
    Ok(())
}
