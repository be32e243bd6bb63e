//! Predictive mutation testing: killed/survived prediction from static
//! mutant features, without executing mutants against the test suite.

mod features;
mod model;

pub use features::{extract_features, MutantFeatures};
pub use model::{
    evaluate_pmt, predict_killed, train_predictor, train_predictor_with_history, PmtMetrics,
    PmtModel, PmtTrainOptions, TrainingMeta,
};
