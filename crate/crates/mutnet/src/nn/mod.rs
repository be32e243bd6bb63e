//! Deterministic dense feedforward classifier engine.
//!
//! Networks are stacks of dense layers ending in a softmax output layer,
//! so [`Network::forward`] always returns a probability vector. Training
//! is plain seeded SGD on mean cross-entropy; repeated calls with the
//! same spec and data produce bit-identical networks.

mod activation;
mod gradient;
mod network;
mod train;

pub use activation::Activation;
pub use gradient::{Gradients, LayerGradients};
pub use network::{Layer, Network};
pub use train::{train, TrainingSpec};
