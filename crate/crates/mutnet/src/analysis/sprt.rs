//! Sequential adversarial-sample detection via Wald's SPRT.
//!
//! Per sample we watch label changes accumulate over the mutant stream
//! and test H0 "LCR <= p0" (normal) against H1 "LCR >= p1" (adversarial).
//! The log-likelihood ratio after k changes in n draws is
//! `k ln(p1/p0) + (n-k) ln((1-p1)/(1-p0))`; crossing `ln((1-beta)/alpha)`
//! accepts H1, crossing `ln(beta/(1-alpha))` accepts H0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mutation::MutantRecord;
use crate::nn::Network;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SprtConfig {
    /// Hypothesized LCR of normal samples.
    pub p0: f64,
    /// Hypothesized LCR of adversarial samples.
    pub p1: f64,
    /// Type I error bound (false adversarial verdicts on normal input).
    pub alpha: f64,
    /// Type II error bound.
    pub beta: f64,
    /// Hard budget of mutant evaluations per sample.
    pub max_mutants: usize,
}

impl SprtConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p0.is_finite()
            && self.p1.is_finite()
            && 0.0 < self.p0
            && self.p0 < self.p1
            && self.p1 < 1.0)
        {
            return Err(Error::InvalidSpec(format!(
                "need 0 < p0 < p1 < 1, got p0={} p1={}",
                self.p0, self.p1
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v.is_finite() && 0.0 < v && v < 0.5) {
                return Err(Error::InvalidSpec(format!(
                    "{name} must lie in (0, 0.5), got {v}"
                )));
            }
        }
        if self.max_mutants == 0 {
            return Err(Error::InvalidSpec("max_mutants must be at least 1".into()));
        }
        Ok(())
    }

    pub fn accept_h1_threshold(&self) -> f64 {
        ((1.0 - self.beta) / self.alpha).ln()
    }

    pub fn accept_h0_threshold(&self) -> f64 {
        (self.beta / (1.0 - self.alpha)).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Normal,
    Adversarial,
    Undecided,
}

/// Outcome of sequential detection for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcrReport {
    pub sample_id: usize,
    /// Label changes over mutants evaluated so far.
    pub lcr: f64,
    pub mutants_evaluated: usize,
    pub verdict: Verdict,
    pub reference_label: usize,
    /// True when the budget ran out and the midpoint rule decided.
    pub forced: bool,
}

/// Runs the SPRT over `mutants`, stopping as soon as a hypothesis wins.
///
/// The stream is consumed in order. If the budget `cfg.max_mutants` is
/// reached without a decision, the midpoint rule `lcr >= (p0+p1)/2`
/// forces a verdict (flagged `forced`). If the stream ends before both
/// the budget and a decision, the verdict is `Undecided`.
pub fn detect<'a, I>(
    sample: &[f64],
    original: &Network,
    mutants: I,
    cfg: &SprtConfig,
    sample_id: usize,
) -> Result<LcrReport>
where
    I: IntoIterator<Item = &'a Network>,
{
    cfg.validate()?;
    let reference_label = original.predict_label(sample)?;

    let log_change = (cfg.p1 / cfg.p0).ln();
    let log_same = ((1.0 - cfg.p1) / (1.0 - cfg.p0)).ln();
    let upper = cfg.accept_h1_threshold();
    let lower = cfg.accept_h0_threshold();

    let mut evaluated = 0usize;
    let mut changes = 0usize;
    let mut llr = 0.0;

    for mutant in mutants {
        let label = mutant.predict_label(sample)?;
        evaluated += 1;
        if label != reference_label {
            changes += 1;
            llr += log_change;
        } else {
            llr += log_same;
        }

        let verdict = if llr >= upper {
            Some(Verdict::Adversarial)
        } else if llr <= lower {
            Some(Verdict::Normal)
        } else {
            None
        };
        if let Some(verdict) = verdict {
            return Ok(LcrReport {
                sample_id,
                lcr: changes as f64 / evaluated as f64,
                mutants_evaluated: evaluated,
                verdict,
                reference_label,
                forced: false,
            });
        }
        if evaluated == cfg.max_mutants {
            let rate = changes as f64 / evaluated as f64;
            let verdict = if rate >= (cfg.p0 + cfg.p1) / 2.0 {
                Verdict::Adversarial
            } else {
                Verdict::Normal
            };
            return Ok(LcrReport {
                sample_id,
                lcr: rate,
                mutants_evaluated: evaluated,
                verdict,
                reference_label,
                forced: true,
            });
        }
    }

    Ok(LcrReport {
        sample_id,
        lcr: if evaluated == 0 {
            0.0
        } else {
            changes as f64 / evaluated as f64
        },
        mutants_evaluated: evaluated,
        verdict: Verdict::Undecided,
        reference_label,
        forced: false,
    })
}

/// Knobs for [`calibrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOptions {
    /// Quantile of normal-sample LCRs that becomes p0.
    pub quantile: f64,
    /// p1 = multiplier * p0 (clamped below 1).
    pub p1_multiplier: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Budget per sample; defaults to the pool size when absent.
    pub max_mutants: Option<usize>,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            quantile: 0.95,
            p1_multiplier: 3.0,
            alpha: 0.05,
            beta: 0.05,
            max_mutants: None,
        }
    }
}

/// Suggests an [`SprtConfig`] from normal-sample LCRs.
///
/// `p0` is the requested quantile of the observed normal LCRs, floored at
/// `1 / |pool|` so a clean calibration set cannot produce a degenerate
/// hypothesis.
pub fn calibrate(
    normal_samples: &[Vec<f64>],
    original: &Network,
    pool: &[MutantRecord],
    opts: &CalibrationOptions,
) -> Result<SprtConfig> {
    const MIN_SAMPLES: usize = 30;
    if normal_samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientCalibrationData {
            got: normal_samples.len(),
            need: MIN_SAMPLES,
        });
    }
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    if !(opts.quantile > 0.0 && opts.quantile <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "quantile must lie in (0, 1], got {}",
            opts.quantile
        )));
    }
    if !(opts.p1_multiplier.is_finite() && opts.p1_multiplier > 1.0) {
        return Err(Error::InvalidSpec(format!(
            "p1 multiplier must exceed 1, got {}",
            opts.p1_multiplier
        )));
    }

    let lcrs = super::batch_lcr(normal_samples, original, pool)?;
    let floor = 1.0 / pool.len() as f64;
    let p0 = nearest_rank_quantile(&lcrs, opts.quantile).max(floor);
    let p1 = (opts.p1_multiplier * p0).min(0.999);
    let cfg = SprtConfig {
        p0,
        p1,
        alpha: opts.alpha,
        beta: opts.beta,
        max_mutants: opts.max_mutants.unwrap_or(pool.len()),
    };
    cfg.validate().map_err(|_| {
        Error::ConvergenceFailed(format!(
            "calibration produced degenerate hypotheses p0={p0} p1={p1}"
        ))
    })?;
    Ok(cfg)
}

/// Nearest-rank quantile: smallest value with at least `q * n` values at
/// or below it.
fn nearest_rank_quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite LCRs"));
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}
