//! Static feature extraction from mutant records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mutation::{MutantRecord, OperatorDescriptor};
use crate::nn::Network;

/// Number of operator indicator slots: 4 model-level kinds plus 5 shared
/// source-level slots indexed by the operator's ordinal within its family
/// (data and program operators both have 5 kinds).
pub const OPERATOR_SLOTS: usize = 9;

/// Features describing one mutant without running it against any test.
///
/// `gate_accuracy_drop` needs a single gate-split accuracy pass, which the
/// pool build already performed; it is not test-suite execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantFeatures {
    /// Exactly one slot set; see [`OPERATOR_SLOTS`].
    pub operator_onehot: [f64; OPERATOR_SLOTS],
    /// Mean normalized depth of layers whose parameters changed,
    /// `(index + 1) / layer_count` per layer; 0 for source-level mutants.
    pub layer_position: f64,
    /// GF: gamma * sigma; other model-level: gamma; data: rate (times
    /// sigma for noise); program: kind-specific magnitude.
    pub perturbation_magnitude: f64,
    /// L2 norm of the parameter delta over the L2 norm of the original
    /// parameters; 1.0 sentinel when architectures differ.
    pub weight_delta_norm: f64,
    /// Baseline gate accuracy minus the mutant's gate accuracy.
    pub gate_accuracy_drop: f64,
}

impl MutantFeatures {
    pub const WIDTH: usize = OPERATOR_SLOTS + 4;

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::WIDTH);
        v.extend_from_slice(&self.operator_onehot);
        v.push(self.layer_position);
        v.push(self.perturbation_magnitude);
        v.push(self.weight_delta_norm);
        v.push(self.gate_accuracy_drop);
        v
    }

    /// Fixed CSV column names, matching [`Self::to_vec`] order.
    pub fn csv_columns() -> [&'static str; Self::WIDTH] {
        [
            "op_gf",
            "op_ws",
            "op_ns",
            "op_nai",
            "op_src_0",
            "op_src_1",
            "op_src_2",
            "op_src_3",
            "op_src_4",
            "layer_position",
            "perturbation_magnitude",
            "weight_delta_norm",
            "gate_accuracy_drop",
        ]
    }
}

/// Extracts the feature vector for a mutant relative to its original.
pub fn extract_features(
    record: &MutantRecord,
    original: &Network,
    baseline_accuracy: f64,
) -> Result<MutantFeatures> {
    if record.network.input_dim() != original.input_dim()
        || record.network.class_count() != original.class_count()
    {
        return Err(Error::DimensionMismatch {
            context: "mutant task shape",
            expected: original.input_dim(),
            actual: record.network.input_dim(),
        });
    }

    let mut onehot = [0.0; OPERATOR_SLOTS];
    let perturbation_magnitude = match &record.operator {
        OperatorDescriptor::Model(spec) => {
            onehot[spec.kind.ordinal()] = 1.0;
            match spec.kind.level() {
                crate::mutation::MutationLevel::Weight => spec.gamma * spec.sigma,
                crate::mutation::MutationLevel::Neuron => spec.gamma,
            }
        }
        OperatorDescriptor::Data(spec) => {
            onehot[4 + spec.kind.ordinal()] = 1.0;
            if spec.kind == crate::data::DataMutationKind::NoisePerturbation {
                spec.rate * spec.sigma
            } else {
                spec.rate
            }
        }
        OperatorDescriptor::Program(spec) => {
            onehot[4 + spec.kind.ordinal()] = 1.0;
            spec.kind.magnitude()
        }
    };

    let (layer_position, weight_delta_norm) = match &record.operator {
        OperatorDescriptor::Model(_) => parameter_delta(original, &record.network),
        _ => {
            if same_architecture(original, &record.network) {
                let (_, delta) = parameter_delta(original, &record.network);
                (0.0, delta)
            } else {
                (0.0, 1.0)
            }
        }
    };

    let features = MutantFeatures {
        operator_onehot: onehot,
        layer_position,
        perturbation_magnitude,
        weight_delta_norm,
        gate_accuracy_drop: baseline_accuracy - record.accuracy,
    };
    if features.to_vec().iter().any(|v| !v.is_finite()) {
        return Err(Error::NotFinite("mutant features".into()));
    }
    Ok(features)
}

fn same_architecture(a: &Network, b: &Network) -> bool {
    a.layers().len() == b.layers().len()
        && a.layers()
            .iter()
            .zip(b.layers())
            .all(|(la, lb)| la.output_dim() == lb.output_dim() && la.input_dim() == lb.input_dim())
}

/// Mean normalized depth of changed layers and the relative delta norm.
fn parameter_delta(original: &Network, mutant: &Network) -> (f64, f64) {
    let layer_count = original.layers().len() as f64;
    let mut delta_sq = 0.0;
    let mut base_sq = 0.0;
    let mut changed_depths = Vec::new();
    for (idx, (a, b)) in original.layers().iter().zip(mutant.layers()).enumerate() {
        let mut layer_changed = false;
        for (ra, rb) in a.weights.iter().zip(&b.weights) {
            for (wa, wb) in ra.iter().zip(rb) {
                let d = wb - wa;
                delta_sq += d * d;
                base_sq += wa * wa;
                layer_changed |= d != 0.0;
            }
        }
        for (ba, bb) in a.biases.iter().zip(&b.biases) {
            let d = bb - ba;
            delta_sq += d * d;
            base_sq += ba * ba;
            layer_changed |= d != 0.0;
        }
        if layer_changed {
            changed_depths.push((idx + 1) as f64 / layer_count);
        }
    }
    let layer_position = if changed_depths.is_empty() {
        0.0
    } else {
        changed_depths.iter().sum::<f64>() / changed_depths.len() as f64
    };
    let delta_norm = if base_sq == 0.0 {
        if delta_sq == 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        (delta_sq / base_sq).sqrt()
    };
    (layer_position, delta_norm)
}
