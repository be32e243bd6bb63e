//! Layer activations.

use serde::{Deserialize, Serialize};

/// Element-wise activation of a dense layer.
///
/// `SoftmaxOutput` is only legal on the final layer; it is applied to the
/// whole pre-activation vector rather than element-wise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
    Identity,
    SoftmaxOutput,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Identity => z,
            Activation::SoftmaxOutput => {
                unreachable!("softmax is applied vector-wise by the layer")
            }
        }
    }

    /// Derivative expressed in terms of the activation's own output.
    ///
    /// For relu the output determines the pre-activation sign (output 0
    /// maps to derivative 0, matching the z <= 0 branch).
    pub fn derivative_from_output(self, out: f64) -> f64 {
        match self {
            Activation::Relu => {
                if out > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - out * out,
            Activation::Sigmoid => out * (1.0 - out),
            Activation::Identity => 1.0,
            Activation::SoftmaxOutput => {
                unreachable!("softmax derivative is folded into the loss delta")
            }
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
            Activation::SoftmaxOutput => "softmax-output",
        };
        f.write_str(name)
    }
}
