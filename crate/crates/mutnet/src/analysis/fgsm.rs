//! Fast-gradient-sign adversarial samples, used to evaluate detection.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureBounds, Split};
use crate::error::{Error, Result};
use crate::nn::Network;

/// A perturbed sample plus a flag for the degenerate zero-gradient case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FgsmOutcome {
    pub sample: Vec<f64>,
    /// True when the loss gradient vanished and the input came back as is.
    pub zero_gradient: bool,
}

/// One-step gradient-sign perturbation, clipped to `bounds`.
///
/// Moves each coordinate by `epsilon` in the direction that increases the
/// cross-entropy of (`sample`, `label`); coordinates with exactly zero
/// gradient stay put.
pub fn fgsm(
    network: &Network,
    sample: &[f64],
    label: usize,
    epsilon: f64,
    bounds: &FeatureBounds,
) -> Result<FgsmOutcome> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidSpec(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    let grad = network.input_gradient(sample, label)?;
    let zero_gradient = grad.iter().all(|&g| g == 0.0);
    let mut out = sample.to_vec();
    if !zero_gradient && epsilon > 0.0 {
        for (v, g) in out.iter_mut().zip(&grad) {
            *v += epsilon * sign(*g);
        }
        bounds.clip(&mut out);
    }
    Ok(FgsmOutcome {
        sample: out,
        zero_gradient,
    })
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Result of the epsilon sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSweep {
    pub epsilon: f64,
    pub flip_rate: f64,
    /// (candidate, flip rate) for every candidate tried, in given order.
    pub tried: Vec<(f64, f64)>,
}

/// Picks the smallest candidate epsilon whose FGSM samples flip at least
/// `target_flip_rate` of the correctly-classified samples in `split`.
pub fn tune_epsilon(
    network: &Network,
    data: &Dataset,
    split: Split,
    candidates: &[f64],
    target_flip_rate: f64,
) -> Result<EpsilonSweep> {
    if candidates.is_empty() {
        return Err(Error::InvalidSpec("no epsilon candidates given".into()));
    }
    if !(0.0..=1.0).contains(&target_flip_rate) {
        return Err(Error::InvalidSpec(format!(
            "target flip rate must lie in [0, 1], got {target_flip_rate}"
        )));
    }
    let bounds = data.feature_bounds();
    let rows: Vec<usize> = data
        .split_indices(split)
        .into_iter()
        .filter(|&row| {
            network
                .predict_label(data.feature(row))
                .map(|l| l == data.label(row))
                .unwrap_or(false)
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptySplit(split));
    }

    let mut tried = Vec::with_capacity(candidates.len());
    let mut chosen: Option<(f64, f64)> = None;
    for &eps in candidates {
        let mut flips = 0usize;
        for &row in &rows {
            let adv = fgsm(network, data.feature(row), data.label(row), eps, &bounds)?;
            if network.predict_label(&adv.sample)? != data.label(row) {
                flips += 1;
            }
        }
        let rate = flips as f64 / rows.len() as f64;
        tried.push((eps, rate));
        if chosen.is_none() && rate >= target_flip_rate {
            chosen = Some((eps, rate));
        }
    }

    match chosen {
        Some((epsilon, flip_rate)) => Ok(EpsilonSweep {
            epsilon,
            flip_rate,
            tried,
        }),
        None => Err(Error::ConvergenceFailed(format!(
            "no candidate epsilon reached flip rate {target_flip_rate}; best {:?}",
            tried
                .iter()
                .cloned()
                .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite rates"))
        ))),
    }
}

/// Minimally perturbed boundary-crossing samples for evaluation.
///
/// For each correctly-classified sample in `split`, walks the candidate
/// epsilons in ascending order and keeps the first FGSM output whose
/// predicted label flips. Samples that never flip are skipped. Returns
/// `(dataset row, adversarial sample)` pairs.
pub fn minimal_flip_samples(
    network: &Network,
    data: &Dataset,
    split: Split,
    candidates: &[f64],
) -> Result<Vec<(usize, Vec<f64>)>> {
    if candidates.is_empty() {
        return Err(Error::InvalidSpec("no epsilon candidates given".into()));
    }
    let bounds = data.feature_bounds();
    let mut out = Vec::new();
    for row in data.split_indices(split) {
        if network.predict_label(data.feature(row))? != data.label(row) {
            continue;
        }
        for &eps in candidates {
            let adv = fgsm(network, data.feature(row), data.label(row), eps, &bounds)?;
            if network.predict_label(&adv.sample)? != data.label(row) {
                out.push((row, adv.sample));
                break;
            }
        }
    }
    Ok(out)
}
