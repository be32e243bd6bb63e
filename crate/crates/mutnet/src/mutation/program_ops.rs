//! Source-level program mutation: perturbing the training configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Activation, TrainingSpec};

/// What to change in the training spec. Layer indices address hidden
/// layers only; the softmax output layer is not a mutation target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProgramMutationKind {
    LayerRemoval {
        index: usize,
    },
    LayerAddition {
        index: usize,
        size: usize,
        activation: Activation,
    },
    ActivationChange {
        index: usize,
        activation: Activation,
    },
    InitSkew {
        factor: f64,
    },
    LearningRateScale {
        factor: f64,
    },
}

impl ProgramMutationKind {
    /// Position of the kind within the source-operator family.
    pub fn ordinal(&self) -> usize {
        match self {
            ProgramMutationKind::LayerRemoval { .. } => 0,
            ProgramMutationKind::LayerAddition { .. } => 1,
            ProgramMutationKind::ActivationChange { .. } => 2,
            ProgramMutationKind::InitSkew { .. } => 3,
            ProgramMutationKind::LearningRateScale { .. } => 4,
        }
    }

    /// Magnitude proxy used as a mutant feature.
    pub fn magnitude(&self) -> f64 {
        match self {
            ProgramMutationKind::LayerRemoval { .. }
            | ProgramMutationKind::LayerAddition { .. }
            | ProgramMutationKind::ActivationChange { .. } => 1.0,
            ProgramMutationKind::InitSkew { factor }
            | ProgramMutationKind::LearningRateScale { factor } => (factor - 1.0).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramMutationSpec {
    #[serde(flatten)]
    pub kind: ProgramMutationKind,
    /// Reserved for operators that sample their own parameters; the five
    /// current kinds are fully determined by their explicit fields.
    #[serde(default)]
    pub seed: u64,
}

/// Returns a new training spec differing only in the mutated field(s).
pub fn apply_program_operator(
    spec: &TrainingSpec,
    pspec: &ProgramMutationSpec,
) -> Result<TrainingSpec> {
    let mut out = spec.clone();
    match &pspec.kind {
        ProgramMutationKind::LayerRemoval { index } => {
            if spec.hidden_sizes.is_empty() {
                return Err(Error::MutationNotApplicable(
                    "layer removal needs at least one hidden layer".into(),
                ));
            }
            check_index(*index, spec.hidden_sizes.len())?;
            out.hidden_sizes.remove(*index);
            out.activations.remove(*index);
        }
        ProgramMutationKind::LayerAddition {
            index,
            size,
            activation,
        } => {
            if *index > spec.hidden_sizes.len() {
                return Err(Error::MutationNotApplicable(format!(
                    "insertion index {index} exceeds hidden layer count {}",
                    spec.hidden_sizes.len()
                )));
            }
            if *size == 0 {
                return Err(Error::InvalidSpec(
                    "added layer size must be positive".into(),
                ));
            }
            if *activation == Activation::SoftmaxOutput {
                return Err(Error::InvalidSpec(
                    "hidden layers cannot use softmax-output".into(),
                ));
            }
            out.hidden_sizes.insert(*index, *size);
            out.activations.insert(*index, *activation);
        }
        ProgramMutationKind::ActivationChange { index, activation } => {
            check_index(*index, spec.hidden_sizes.len())?;
            if *activation == Activation::SoftmaxOutput {
                return Err(Error::InvalidSpec(
                    "hidden layers cannot use softmax-output".into(),
                ));
            }
            out.activations[*index] = *activation;
        }
        ProgramMutationKind::InitSkew { factor } => {
            check_factor(*factor)?;
            out.init_scale *= factor;
        }
        ProgramMutationKind::LearningRateScale { factor } => {
            check_factor(*factor)?;
            out.learning_rate *= factor;
        }
    }
    out.validate()?;
    Ok(out)
}

fn check_index(index: usize, hidden_count: usize) -> Result<()> {
    if index >= hidden_count {
        return Err(Error::MutationNotApplicable(format!(
            "hidden layer index {index} out of range (count {hidden_count})"
        )));
    }
    Ok(())
}

fn check_factor(factor: f64) -> Result<()> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "scale factor must be positive, got {factor}"
        )));
    }
    Ok(())
}
