//! Backpropagation for mean cross-entropy over softmax outputs.

use super::network::Network;
use crate::error::{Error, Result};

/// Per-layer parameter gradients, shaped exactly like the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

/// Gradients of the batch loss for every layer, input-most first.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradients>,
}

impl Gradients {
    fn zeros_like(net: &Network) -> Gradients {
        Gradients {
            layers: net
                .layers()
                .iter()
                .map(|l| LayerGradients {
                    weights: vec![vec![0.0; l.input_dim()]; l.output_dim()],
                    biases: vec![0.0; l.output_dim()],
                })
                .collect(),
        }
    }

    fn scale(&mut self, factor: f64) {
        for layer in &mut self.layers {
            for row in &mut layer.weights {
                for w in row {
                    *w *= factor;
                }
            }
            for b in &mut layer.biases {
                *b *= factor;
            }
        }
    }
}

impl Network {
    /// Gradient of mean cross-entropy loss over the batch.
    pub fn gradient(&self, batch: &[(&[f64], usize)]) -> Result<Gradients> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let mut total = Gradients::zeros_like(self);
        for &(input, label) in batch {
            self.accumulate_sample(input, label, &mut total)?;
        }
        total.scale(1.0 / batch.len() as f64);
        Ok(total)
    }

    /// Gradient of a single sample's cross-entropy with respect to the input.
    pub fn input_gradient(&self, input: &[f64], label: usize) -> Result<Vec<f64>> {
        self.check_label(label)?;
        let trace = self.checked_trace(input)?;
        Ok(self.backward(&trace, label, None))
    }

    fn accumulate_sample(&self, input: &[f64], label: usize, acc: &mut Gradients) -> Result<()> {
        self.check_label(label)?;
        let trace = self.checked_trace(input)?;
        self.backward(&trace, label, Some(acc));
        Ok(())
    }

    fn checked_trace(&self, input: &[f64]) -> Result<Vec<Vec<f64>>> {
        // forward validates on the way in; reuse its checks then trace
        self.forward(input).map(|_| ())?;
        Ok(self.forward_trace(input))
    }

    /// Backward pass over one traced sample.
    ///
    /// With softmax + cross-entropy the output delta is `p - onehot(label)`.
    /// Parameter gradients are accumulated into `acc` when given; the return
    /// value is the loss gradient with respect to the network input.
    fn backward(
        &self,
        trace: &[Vec<f64>],
        label: usize,
        mut acc: Option<&mut Gradients>,
    ) -> Vec<f64> {
        let mut delta: Vec<f64> = trace.last().expect("trace has output").clone();
        delta[label] -= 1.0;

        for (idx, layer) in self.layers().iter().enumerate().rev() {
            let layer_input = &trace[idx];
            if let Some(grads) = acc.as_deref_mut() {
                let lg = &mut grads.layers[idx];
                for (o, d) in delta.iter().enumerate() {
                    lg.biases[o] += d;
                    for (i, x) in layer_input.iter().enumerate() {
                        lg.weights[o][i] += d * x;
                    }
                }
            }

            // propagate: d_input = W^T delta, then apply the upstream
            // layer's activation derivative (the raw input has none)
            let mut below = vec![0.0; layer.input_dim()];
            for (o, d) in delta.iter().enumerate() {
                for (i, w) in layer.weights[o].iter().enumerate() {
                    below[i] += w * d;
                }
            }
            if idx > 0 {
                let upstream = self.layers()[idx - 1].activation;
                for (v, out) in below.iter_mut().zip(&trace[idx]) {
                    *v *= upstream.derivative_from_output(*out);
                }
            }
            delta = below;
        }
        delta
    }
}
