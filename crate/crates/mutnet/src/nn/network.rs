//! Network and layer types, inference, and the JSON model format.

use serde::{Deserialize, Serialize};

use super::activation::Activation;
use crate::error::{Error, Result};

/// One dense layer: `out = activation(W x + b)`.
///
/// `weights[o][i]` connects input `i` to output neuron `o`; row `o` is the
/// incoming weight vector of neuron `o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn new(weights: Vec<Vec<f64>>, biases: Vec<f64>, activation: Activation) -> Self {
        Layer {
            weights,
            biases,
            activation,
        }
    }

    pub fn output_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    fn pre_activation(&self, input: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(row, b)| b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>())
            .collect()
    }

    /// Applies the affine transform and activation to one input vector.
    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut z = self.pre_activation(input);
        match self.activation {
            Activation::SoftmaxOutput => softmax_in_place(&mut z),
            act => {
                for v in &mut z {
                    *v = act.apply(*v);
                }
            }
        }
        z
    }
}

/// Numerically stable softmax.
fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// A validated feedforward classifier. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkRepr", into = "NetworkRepr")]
pub struct Network {
    input_dim: usize,
    class_count: usize,
    layers: Vec<Layer>,
}

/// Serialized form; `try_from` funnels deserialization through validation.
#[derive(Serialize, Deserialize)]
struct NetworkRepr {
    input_dim: usize,
    class_count: usize,
    layers: Vec<Layer>,
}

impl TryFrom<NetworkRepr> for Network {
    type Error = Error;

    fn try_from(repr: NetworkRepr) -> Result<Self> {
        Network::new(repr.input_dim, repr.class_count, repr.layers)
    }
}

impl From<Network> for NetworkRepr {
    fn from(net: Network) -> Self {
        NetworkRepr {
            input_dim: net.input_dim,
            class_count: net.class_count,
            layers: net.layers,
        }
    }
}

impl Network {
    /// Validates layer chaining, finiteness, and softmax placement.
    ///
    /// The final layer must be `SoftmaxOutput` so that `forward` always
    /// yields a probability vector; softmax anywhere else is rejected.
    pub fn new(input_dim: usize, class_count: usize, layers: Vec<Layer>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidSpec("input_dim must be positive".into()));
        }
        if class_count < 2 {
            return Err(Error::InvalidSpec("class_count must be at least 2".into()));
        }
        if layers.is_empty() {
            return Err(Error::InvalidSpec(
                "network needs at least one layer".into(),
            ));
        }

        let mut expected_in = input_dim;
        let last = layers.len() - 1;
        for (idx, layer) in layers.iter().enumerate() {
            if layer.weights.is_empty() {
                return Err(Error::InvalidSpec(format!("layer {idx} has no neurons")));
            }
            if layer.biases.len() != layer.weights.len() {
                return Err(Error::DimensionMismatch {
                    context: "layer bias count",
                    expected: layer.weights.len(),
                    actual: layer.biases.len(),
                });
            }
            for row in &layer.weights {
                if row.len() != expected_in {
                    return Err(Error::DimensionMismatch {
                        context: "layer input width",
                        expected: expected_in,
                        actual: row.len(),
                    });
                }
                if row.iter().any(|w| !w.is_finite()) {
                    return Err(Error::NotFinite(format!("weights of layer {idx}")));
                }
            }
            if layer.biases.iter().any(|b| !b.is_finite()) {
                return Err(Error::NotFinite(format!("biases of layer {idx}")));
            }
            let is_softmax = layer.activation == Activation::SoftmaxOutput;
            if idx == last && !is_softmax {
                return Err(Error::InvalidSpec(
                    "final layer must use softmax-output".into(),
                ));
            }
            if idx != last && is_softmax {
                return Err(Error::InvalidSpec(
                    "softmax-output is only allowed on the final layer".into(),
                ));
            }
            expected_in = layer.output_dim();
        }
        if expected_in != class_count {
            return Err(Error::DimensionMismatch {
                context: "final layer output width",
                expected: class_count,
                actual: expected_in,
            });
        }

        Ok(Network {
            input_dim,
            class_count,
            layers,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Rebuilds a network with new layers after re-validation.
    pub fn with_layers(&self, layers: Vec<Layer>) -> Result<Network> {
        Network::new(self.input_dim, self.class_count, layers)
    }

    /// Total weight count across all layers (biases excluded).
    pub fn weight_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.output_dim() * l.input_dim())
            .sum()
    }

    /// Total neuron count across all layers.
    pub fn neuron_count(&self) -> usize {
        self.layers.iter().map(Layer::output_dim).sum()
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                context: "input vector",
                expected: self.input_dim,
                actual: input.len(),
            });
        }
        if input.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotFinite("input vector".into()));
        }
        Ok(())
    }

    /// Class probability vector for one input.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut current = input.to_vec();
        for layer in &self.layers {
            current = layer.forward(&current);
        }
        Ok(current)
    }

    /// Activations of every layer, input first. Used by backprop.
    pub(crate) fn forward_trace(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut trace = Vec::with_capacity(self.layers.len() + 1);
        trace.push(input.to_vec());
        for layer in &self.layers {
            let next = layer.forward(trace.last().expect("trace is never empty"));
            trace.push(next);
        }
        trace
    }

    /// Predicted class index: argmax of `forward`, ties to the lowest index.
    pub fn predict_label(&self, input: &[f64]) -> Result<usize> {
        let probs = self.forward(input)?;
        Ok(argmax(&probs))
    }

    /// Mean cross-entropy of the batch, computed from log-softmax directly.
    pub fn batch_loss(&self, batch: &[(&[f64], usize)]) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let mut total = 0.0;
        for &(input, label) in batch {
            self.check_label(label)?;
            total += self.sample_loss(input, label)?;
        }
        Ok(total / batch.len() as f64)
    }

    /// Cross-entropy of a single sample via log-sum-exp on the final logits.
    pub(crate) fn sample_loss(&self, input: &[f64], label: usize) -> Result<f64> {
        self.check_input(input)?;
        self.check_label(label)?;
        let mut current = input.to_vec();
        for layer in &self.layers[..self.layers.len() - 1] {
            current = layer.forward(&current);
        }
        let logits = self
            .layers
            .last()
            .expect("network has layers")
            .pre_activation(&current);
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum: f64 = logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln() + max;
        Ok(log_sum - logits[label])
    }

    pub(crate) fn check_label(&self, label: usize) -> Result<()> {
        if label >= self.class_count {
            return Err(Error::InvalidSpec(format!(
                "label {label} out of range for {} classes",
                self.class_count
            )));
        }
        Ok(())
    }

    /// Serializes to the model JSON format (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("network serialization");
        s.push('\n');
        s
    }

    /// Parses and validates a model JSON document.
    pub fn from_json(json: &str) -> Result<Network> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Index of the largest value; ties broken by the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_softmax_layer(weights: Vec<Vec<f64>>, biases: Vec<f64>) -> Network {
        let input_dim = weights[0].len();
        let classes = weights.len();
        Network::new(
            input_dim,
            classes,
            vec![Layer::new(weights, biases, Activation::SoftmaxOutput)],
        )
        .unwrap()
    }

    #[test]
    fn zero_weight_three_class_forward_is_uniform() {
        let net = single_softmax_layer(vec![vec![0.0; 2]; 3], vec![0.0; 3]);
        let probs = net.forward(&[0.4, -1.2]).unwrap();
        for p in &probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn opposed_weights_give_even_split_at_origin() {
        let net = single_softmax_layer(vec![vec![1.0], vec![-1.0]], vec![0.0, 0.0]);
        let probs = net.forward(&[0.0]).unwrap();
        assert_eq!(probs, vec![0.5, 0.5]);
    }

    #[test]
    fn identity_weight_softmax_matches_hand_evaluation() {
        // logits (2, 0): softmax = (e^2, 1) / (e^2 + 1)
        let net = single_softmax_layer(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]);
        let probs = net.forward(&[2.0, 0.0]).unwrap();
        let e2 = 2f64.exp();
        assert!((probs[0] - e2 / (e2 + 1.0)).abs() < 1e-15);
        assert!((probs[1] - 1.0 / (e2 + 1.0)).abs() < 1e-15);
        assert!((probs[0] - 0.8807970779778823).abs() < 1e-12);
        assert!((probs[1] - 0.1192029220221177).abs() < 1e-12);
        assert_eq!(net.predict_label(&[2.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn argmax_breaks_ties_toward_lowest_index() {
        assert_eq!(argmax(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.2]), 1);
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
    }

    #[test]
    fn predict_label_on_uniform_output_is_class_zero() {
        let net = single_softmax_layer(vec![vec![0.0; 2]; 3], vec![0.0; 3]);
        assert_eq!(net.predict_label(&[5.0, -3.0]).unwrap(), 0);
    }

    #[test]
    fn forward_rejects_wrong_dimension_and_nonfinite() {
        let net = single_softmax_layer(vec![vec![0.0; 2]; 3], vec![0.0; 3]);
        assert!(matches!(
            net.forward(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            net.forward(&[f64::NAN, 0.0]),
            Err(Error::NotFinite(_))
        ));
    }

    #[test]
    fn constructor_rejects_bad_shapes_and_placements() {
        // softmax on a hidden layer
        let err = Network::new(
            2,
            2,
            vec![
                Layer::new(
                    vec![vec![0.0, 0.0]; 2],
                    vec![0.0; 2],
                    Activation::SoftmaxOutput,
                ),
                Layer::new(
                    vec![vec![0.0, 0.0]; 2],
                    vec![0.0; 2],
                    Activation::SoftmaxOutput,
                ),
            ],
        );
        assert!(matches!(err, Err(Error::InvalidSpec(_))));

        // final layer not softmax
        let err = Network::new(
            2,
            2,
            vec![Layer::new(
                vec![vec![0.0, 0.0]; 2],
                vec![0.0; 2],
                Activation::Identity,
            )],
        );
        assert!(matches!(err, Err(Error::InvalidSpec(_))));

        // chained widths disagree
        let err = Network::new(
            2,
            2,
            vec![
                Layer::new(vec![vec![0.0, 0.0]; 3], vec![0.0; 3], Activation::Relu),
                Layer::new(
                    vec![vec![0.0, 0.0]; 2],
                    vec![0.0; 2],
                    Activation::SoftmaxOutput,
                ),
            ],
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));

        // non-finite weight
        let err = Network::new(
            1,
            2,
            vec![Layer::new(
                vec![vec![f64::INFINITY], vec![0.0]],
                vec![0.0; 2],
                Activation::SoftmaxOutput,
            )],
        );
        assert!(matches!(err, Err(Error::NotFinite(_))));
    }

    #[test]
    fn json_loader_rejects_dimension_mismatch() {
        let doc = r#"{
            "input_dim": 2,
            "class_count": 2,
            "layers": [
                {"weights": [[0.1, 0.2], [0.3]], "biases": [0.0, 0.0], "activation": "softmax-output"}
            ]
        }"#;
        assert!(Network::from_json(doc).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let net = single_softmax_layer(
            vec![vec![0.1, -0.27, 1.5e-13], vec![3.7, 0.0, -9.25]],
            vec![0.5, -0.125],
        );
        let restored = Network::from_json(&net.to_json()).unwrap();
        assert_eq!(net, restored);
    }

    #[test]
    fn sample_loss_matches_forward_probability() {
        let net = single_softmax_layer(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.2, -0.4]);
        let input = [0.3, -1.1];
        let probs = net.forward(&input).unwrap();
        let loss = net.sample_loss(&input, 1).unwrap();
        assert!((loss - (-probs[1].ln())).abs() < 1e-12);
    }
}
