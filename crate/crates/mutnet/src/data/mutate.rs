//! Source-level data mutation operators.
//!
//! All five operators corrupt the train split only; validation and test
//! rows pass through untouched. Selection draws `ceil(rate * |train|)`
//! distinct train rows from the spec's seed, so the affected index set is
//! a pure function of `(seed, rate, |train|)`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, Split};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataMutationKind {
    LabelError,
    DataMissing,
    DataRepetition,
    NoisePerturbation,
    DataShuffle,
}

impl DataMutationKind {
    pub const ALL: [DataMutationKind; 5] = [
        DataMutationKind::LabelError,
        DataMutationKind::DataMissing,
        DataMutationKind::DataRepetition,
        DataMutationKind::NoisePerturbation,
        DataMutationKind::DataShuffle,
    ];

    /// Position of the kind within the source-operator family.
    pub fn ordinal(self) -> usize {
        Self::ALL
            .iter()
            .position(|&k| k == self)
            .expect("member of ALL")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMutationSpec {
    pub kind: DataMutationKind,
    pub rate: f64,
    /// Noise standard deviation; only noise_perturbation reads it.
    #[serde(default)]
    pub sigma: f64,
    pub seed: u64,
}

impl DataMutationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) || !self.rate.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "data mutation rate must lie in [0, 1], got {}",
                self.rate
            )));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidSpec("sigma must be non-negative".into()));
        }
        Ok(())
    }
}

/// Applies one data mutation operator to the train split.
pub fn mutate_data(data: &Dataset, spec: &DataMutationSpec) -> Result<Dataset> {
    spec.validate()?;
    let train_rows = data.split_indices(Split::Train);
    if train_rows.is_empty() {
        return Err(Error::EmptySplit(Split::Train));
    }
    let selected = select_rows(&train_rows, spec.rate, spec.seed);

    let provenance = format!(
        "{} | {:?} rate={} sigma={} seed={}",
        data.provenance(),
        spec.kind,
        spec.rate,
        spec.sigma,
        spec.seed
    );

    let mut features: Vec<Vec<f64>> = (0..data.len()).map(|i| data.feature(i).to_vec()).collect();
    let mut labels: Vec<usize> = (0..data.len()).map(|i| data.label(i)).collect();
    let mut tags: Vec<Split> = (0..data.len()).map(|i| data.split_tag(i)).collect();

    match spec.kind {
        DataMutationKind::LabelError => {
            let mut r = rng::stream(spec.seed, "label-error", 0);
            for &row in &selected {
                // uniform over the other classes, never the original
                let offset = r.random_range(1..data.class_count());
                labels[row] = (labels[row] + offset) % data.class_count();
            }
        }
        DataMutationKind::DataMissing => {
            if selected.len() == train_rows.len() {
                return Err(Error::TrainSplitEmptied);
            }
            let mut drop = vec![false; data.len()];
            for &row in &selected {
                drop[row] = true;
            }
            let kept: Vec<usize> = (0..data.len()).filter(|&i| !drop[i]).collect();
            features = kept.iter().map(|&i| data.feature(i).to_vec()).collect();
            labels = kept.iter().map(|&i| data.label(i)).collect();
            tags = kept.iter().map(|&i| data.split_tag(i)).collect();
        }
        DataMutationKind::DataRepetition => {
            for &row in &selected {
                features.push(features[row].clone());
                labels.push(labels[row]);
                tags.push(Split::Train);
            }
        }
        DataMutationKind::NoisePerturbation => {
            let mut r = rng::stream(spec.seed, "noise-perturbation", 0);
            for &row in &selected {
                for v in &mut features[row] {
                    *v += spec.sigma * rng::standard_normal(&mut r);
                }
            }
        }
        DataMutationKind::DataShuffle => {
            // permute the selected rows among their own positions
            let mut destinations = selected.clone();
            destinations.shuffle(&mut rng::stream(spec.seed, "data-shuffle", 0));
            let moved_features: Vec<Vec<f64>> =
                selected.iter().map(|&r| features[r].clone()).collect();
            let moved_labels: Vec<usize> = selected.iter().map(|&r| labels[r]).collect();
            for (i, &dest) in destinations.iter().enumerate() {
                features[dest] = moved_features[i].clone();
                labels[dest] = moved_labels[i];
            }
        }
    }

    data.with_rows(features, labels, tags, provenance)
}

/// Seeded sample of `ceil(rate * n)` distinct rows, returned sorted.
fn select_rows(train_rows: &[usize], rate: f64, seed: u64) -> Vec<usize> {
    let count = (rate * train_rows.len() as f64).ceil() as usize;
    let count = count.min(train_rows.len());
    if count == 0 {
        return Vec::new();
    }
    let mut r = rng::stream(seed, "row-select", 0);
    let picked = rand::seq::index::sample(&mut r, train_rows.len(), count);
    let mut rows: Vec<usize> = picked.iter().map(|i| train_rows[i]).collect();
    rows.sort_unstable();
    rows
}
