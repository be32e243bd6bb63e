//! The labelled dataset type and split bookkeeping.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Which partition a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidSpec(format!("unknown split {other:?}"))),
        }
    }
}

/// Feature matrix, class labels, and per-row split tags.
///
/// Immutable after construction; mutation operators return new datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DatasetRepr", into = "DatasetRepr")]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    split_tags: Vec<Split>,
    class_count: usize,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct DatasetRepr {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    split_tags: Vec<Split>,
    class_count: usize,
    provenance: String,
}

impl TryFrom<DatasetRepr> for Dataset {
    type Error = Error;

    fn try_from(r: DatasetRepr) -> Result<Self> {
        Dataset::new(
            r.features,
            r.labels,
            r.split_tags,
            r.class_count,
            r.provenance,
        )
    }
}

impl From<Dataset> for DatasetRepr {
    fn from(d: Dataset) -> Self {
        DatasetRepr {
            features: d.features,
            labels: d.labels,
            split_tags: d.split_tags,
            class_count: d.class_count,
            provenance: d.provenance,
        }
    }
}

impl Dataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        split_tags: Vec<Split>,
        class_count: usize,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if labels.len() != features.len() || split_tags.len() != features.len() {
            return Err(Error::DimensionMismatch {
                context: "dataset row count",
                expected: features.len(),
                actual: labels.len().min(split_tags.len()),
            });
        }
        if class_count < 2 {
            return Err(Error::InvalidSpec("class_count must be at least 2".into()));
        }
        let width = features[0].len();
        if width == 0 {
            return Err(Error::InvalidSpec(
                "features must have at least one column".into(),
            ));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    context: "feature row width",
                    expected: width,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NotFinite(format!("features of row {i}")));
            }
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= class_count) {
            return Err(Error::InvalidSpec(format!(
                "label {bad} out of range for {class_count} classes"
            )));
        }
        Ok(Dataset {
            features,
            labels,
            split_tags,
            class_count,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn feature(&self, row: usize) -> &[f64] {
        &self.features[row]
    }

    pub fn label(&self, row: usize) -> usize {
        self.labels[row]
    }

    pub fn split_tag(&self, row: usize) -> Split {
        self.split_tags[row]
    }

    /// Row indices belonging to `split`, in dataset order.
    pub fn split_indices(&self, split: Split) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.split_tags[i] == split)
            .collect()
    }

    pub fn split_len(&self, split: Split) -> usize {
        self.split_tags.iter().filter(|&&t| t == split).count()
    }

    /// Reassigns split tags by seeded shuffle with largest-remainder sizing.
    pub fn with_splits(&self, fractions: [f64; 3], seed: u64) -> Result<Dataset> {
        let sizes = largest_remainder_sizes(self.len(), fractions)?;
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut rng::stream(seed, "split-assign", 0));
        let mut tags = vec![Split::Train; self.len()];
        for (pos, &row) in order.iter().enumerate() {
            tags[row] = if pos < sizes[0] {
                Split::Train
            } else if pos < sizes[0] + sizes[1] {
                Split::Val
            } else {
                Split::Test
            };
        }
        let mut out = self.clone();
        out.split_tags = tags;
        Ok(out)
    }

    /// Rebuilds with the given rows (used by the data mutation operators).
    pub(crate) fn with_rows(
        &self,
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        split_tags: Vec<Split>,
        provenance: String,
    ) -> Result<Dataset> {
        Dataset::new(features, labels, split_tags, self.class_count, provenance)
    }

    /// Observed per-feature min/max over all rows.
    pub fn feature_bounds(&self) -> FeatureBounds {
        let d = self.feature_dim();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in &self.features {
            for (j, v) in row.iter().enumerate() {
                min[j] = min[j].min(*v);
                max[j] = max[j].max(*v);
            }
        }
        FeatureBounds { min, max }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dataset serialization");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Dataset> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Per-feature value ranges, used to clip perturbed samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl FeatureBounds {
    pub fn clip(&self, sample: &mut [f64]) {
        for (v, (lo, hi)) in sample.iter_mut().zip(self.min.iter().zip(&self.max)) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// Deterministic integer split sizes for `n` rows under `fractions`.
///
/// Floors the exact quotas, then hands out the remainder by largest
/// fractional part (ties go to the earlier split).
pub fn largest_remainder_sizes(n: usize, fractions: [f64; 3]) -> Result<[usize; 3]> {
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::InvalidSpec(
            "split fractions must lie in [0, 1]".into(),
        ));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpec(format!(
            "split fractions must sum to 1, got {total}"
        )));
    }
    let quotas: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa)
            .expect("finite fractions")
            .then(a.cmp(&b))
    });
    for i in 0..(n - assigned) {
        sizes[order[i % 3]] += 1;
    }
    Ok([sizes[0], sizes[1], sizes[2]])
}
