//! Mutation testing for small dense feedforward classifiers.
//!
//! The crate is organized around a desk-scale pipeline:
//!
//! 1. [`data`] builds or loads a labelled dataset and can corrupt its
//!    training split with source-level data mutation operators.
//! 2. [`nn`] trains a deterministic softmax classifier and evaluates it.
//! 3. [`mutation`] derives mutants, either by perturbing a trained model
//!    directly (Gaussian fuzzing, weight shuffling, neuron switching,
//!    activation inversion) or by retraining under a mutated training
//!    configuration, and filters them through an accuracy quality gate.
//! 4. [`analysis`] scores test suites against a mutant pool (kill matrix,
//!    mutation score) and uses per-sample label change rates for runtime
//!    adversarial-input detection with a sequential stopping rule.
//! 5. [`pmt`] predicts killed/survived outcomes from static mutant
//!    features without executing the mutants against the test suite.
//!
//! Every operation is a pure function of its inputs. All randomness is
//! drawn from named [`rng`] streams keyed by caller-provided seeds, so
//! identical inputs reproduce identical outputs byte for byte.

pub mod analysis;
pub mod data;
pub mod error;
pub mod mutation;
pub mod nn;
pub mod pmt;
pub mod rng;

pub use error::{Error, Result};
