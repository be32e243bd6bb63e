//! Logistic killed/survived predictor.

use serde::{Deserialize, Serialize};

use super::features::MutantFeatures;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
}

/// Logistic model over raw mutant features:
/// `P(killed) = sigmoid(weights . features + bias)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmtModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub training_meta: TrainingMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmtTrainOptions {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for PmtTrainOptions {
    fn default() -> Self {
        PmtTrainOptions {
            seed: 0,
            epochs: 500,
            learning_rate: 0.5,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Fits the logistic model; see [`train_predictor_with_history`].
pub fn train_predictor(
    features: &[MutantFeatures],
    killed: &[bool],
    opts: &PmtTrainOptions,
) -> Result<PmtModel> {
    train_predictor_with_history(features, killed, opts).map(|(model, _)| model)
}

/// Fits by full-batch gradient descent on mean cross-entropy and returns
/// the per-epoch loss trace.
///
/// Features are standardized internally for conditioning and the scaler
/// is folded back into the returned weights, so prediction runs on raw
/// features. A halving backtrack on the step size keeps the recorded
/// loss non-increasing; training stops early once the step underflows.
pub fn train_predictor_with_history(
    features: &[MutantFeatures],
    killed: &[bool],
    opts: &PmtTrainOptions,
) -> Result<(PmtModel, Vec<f64>)> {
    const MIN_MUTANTS: usize = 20;
    if features.len() < MIN_MUTANTS {
        return Err(Error::DegenerateTrainingSet(format!(
            "need at least {MIN_MUTANTS} labeled mutants, got {}",
            features.len()
        )));
    }
    if features.len() != killed.len() {
        return Err(Error::DimensionMismatch {
            context: "pmt labels",
            expected: features.len(),
            actual: killed.len(),
        });
    }
    let positives = killed.iter().filter(|&&k| k).count();
    if positives == 0 || positives == killed.len() {
        return Err(Error::DegenerateTrainingSet(
            "both killed and survived mutants are required".into(),
        ));
    }
    if !(opts.learning_rate.is_finite() && opts.learning_rate > 0.0) {
        return Err(Error::InvalidSpec("learning_rate must be positive".into()));
    }

    let raw: Vec<Vec<f64>> = features.iter().map(MutantFeatures::to_vec).collect();
    let width = MutantFeatures::WIDTH;
    let n = raw.len() as f64;

    // standardize; constant columns keep scale 1 so they stay inert
    let mut mean = vec![0.0; width];
    for row in &raw {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    let mut std = vec![0.0; width];
    for row in &raw {
        for (s, (v, m)) in std.iter_mut().zip(row.iter().zip(&mean)) {
            *s += (v - m) * (v - m) / n;
        }
    }
    for s in &mut std {
        *s = s.sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let x: Vec<Vec<f64>> = raw
        .iter()
        .map(|row| {
            row.iter()
                .zip(mean.iter().zip(&std))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        })
        .collect();
    let y: Vec<f64> = killed.iter().map(|&k| if k { 1.0 } else { 0.0 }).collect();

    let loss_of = |w: &[f64], b: f64| -> f64 {
        x.iter()
            .zip(&y)
            .map(|(row, &t)| {
                let z: f64 = b + row.iter().zip(w).map(|(v, wi)| v * wi).sum::<f64>();
                // stable form of -[t ln p + (1-t) ln(1-p)]
                z.max(0.0) - z * t + (1.0 + (-z.abs()).exp()).ln()
            })
            .sum::<f64>()
            / n
    };

    let mut w = vec![0.0; width];
    let mut b = 0.0;
    let mut lr = opts.learning_rate;
    let mut history = vec![loss_of(&w, b)];

    for _ in 0..opts.epochs {
        let mut grad_w = vec![0.0; width];
        let mut grad_b = 0.0;
        for (row, &t) in x.iter().zip(&y) {
            let z: f64 = b + row.iter().zip(&w).map(|(v, wi)| v * wi).sum::<f64>();
            let err = sigmoid(z) - t;
            grad_b += err / n;
            for (g, v) in grad_w.iter_mut().zip(row) {
                *g += err * v / n;
            }
        }

        let current = *history.last().expect("seeded with initial loss");
        let mut stepped = false;
        while lr > 1e-12 {
            let cand_w: Vec<f64> = w.iter().zip(&grad_w).map(|(wi, g)| wi - lr * g).collect();
            let cand_b = b - lr * grad_b;
            let cand_loss = loss_of(&cand_w, cand_b);
            if cand_loss <= current {
                w = cand_w;
                b = cand_b;
                history.push(cand_loss);
                stepped = true;
                break;
            }
            lr /= 2.0;
        }
        if !stepped {
            break;
        }
    }

    // fold the scaler into the parameters so prediction is raw-feature
    let weights: Vec<f64> = w.iter().zip(&std).map(|(wi, s)| wi / s).collect();
    let bias = b - weights.iter().zip(&mean).map(|(wi, m)| wi * m).sum::<f64>();
    Ok((
        PmtModel {
            weights,
            bias,
            training_meta: TrainingMeta {
                seed: opts.seed,
                epochs: opts.epochs,
                learning_rate: opts.learning_rate,
            },
        },
        history,
    ))
}

/// Kill probability and the thresholded prediction (`p >= 0.5`).
pub fn predict_killed(model: &PmtModel, features: &MutantFeatures) -> Result<(f64, bool)> {
    let v = features.to_vec();
    if v.len() != model.weights.len() {
        return Err(Error::DimensionMismatch {
            context: "pmt feature width",
            expected: model.weights.len(),
            actual: v.len(),
        });
    }
    let z: f64 = model.bias
        + v.iter()
            .zip(&model.weights)
            .map(|(x, w)| x * w)
            .sum::<f64>();
    let p = sigmoid(z);
    Ok((p, p >= 0.5))
}

/// Confusion-matrix metrics for killed/survived prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmtMetrics {
    pub accuracy: f64,
    /// Of mutants predicted killed, the fraction actually killed.
    pub precision: f64,
    /// Of killed mutants, the fraction predicted killed.
    pub recall: f64,
    /// Majority-class rate; the accuracy of always guessing it.
    pub baseline_accuracy: f64,
}

pub fn evaluate_pmt(predictions: &[bool], ground_truth: &[bool]) -> Result<PmtMetrics> {
    if predictions.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if predictions.len() != ground_truth.len() {
        return Err(Error::DimensionMismatch {
            context: "pmt evaluation",
            expected: ground_truth.len(),
            actual: predictions.len(),
        });
    }
    let n = predictions.len() as f64;
    let mut tp = 0.0f64;
    let mut fp = 0.0f64;
    let mut tn = 0.0f64;
    let mut fneg = 0.0f64;
    for (&p, &t) in predictions.iter().zip(ground_truth) {
        match (p, t) {
            (true, true) => tp += 1.0,
            (true, false) => fp += 1.0,
            (false, false) => tn += 1.0,
            (false, true) => fneg += 1.0,
        }
    }
    let killed = tp + fneg;
    let majority = killed.max(n - killed) / n;
    Ok(PmtMetrics {
        accuracy: (tp + tn) / n,
        precision: if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) },
        recall: if killed == 0.0 { 0.0 } else { tp / killed },
        baseline_accuracy: majority,
    })
}
