//! Deterministic synthetic 2-D benchmark datasets.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, Split};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    Blobs,
    TwoMoons,
    Spirals,
}

/// Generates a balanced two-class 2-D dataset, all rows tagged train.
///
/// Class sizes differ by at most one (class 0 gets the extra row when `n`
/// is odd). `noise` is the standard deviation of Gaussian jitter added to
/// both coordinates; zero collapses each class onto its noiseless curve.
pub fn generate_synthetic(kind: SyntheticKind, n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(Error::InvalidSpec(format!("need n >= 4 samples, got {n}")));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::InvalidSpec("noise must be non-negative".into()));
    }

    let n0 = n.div_ceil(2);
    let n1 = n - n0;
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut noise_rng = rng::stream(seed, "synthetic-noise", 0);

    for (class, count) in [(0usize, n0), (1usize, n1)] {
        for i in 0..count {
            let t = if count > 1 {
                i as f64 / (count - 1) as f64
            } else {
                0.0
            };
            let (mut x, mut y) = base_point(kind, class, t);
            x += noise * rng::standard_normal(&mut noise_rng);
            y += noise * rng::standard_normal(&mut noise_rng);
            features.push(vec![x, y]);
            labels.push(class);
        }
    }

    let tags = vec![Split::Train; n];
    let provenance = format!("synthetic:{kind:?} n={n} noise={noise} seed={seed}");
    Dataset::new(features, labels, tags, 2, provenance)
}

/// Noiseless curve point for `class` at curve parameter `t` in [0, 1].
fn base_point(kind: SyntheticKind, class: usize, t: f64) -> (f64, f64) {
    match kind {
        SyntheticKind::Blobs => {
            if class == 0 {
                (-2.0, -2.0)
            } else {
                (2.0, 2.0)
            }
        }
        SyntheticKind::TwoMoons => {
            let a = PI * t;
            if class == 0 {
                (a.cos(), a.sin())
            } else {
                (1.0 - a.cos(), 0.5 - a.sin())
            }
        }
        SyntheticKind::Spirals => {
            let r = 0.15 + 0.85 * t;
            let phi = 3.0 * PI * t + class as f64 * PI;
            (r * phi.cos(), r * phi.sin())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_blobs_collapse_to_centers() {
        let d = generate_synthetic(SyntheticKind::Blobs, 100, 0.0, 3).unwrap();
        for i in 0..d.len() {
            let expected = if d.label(i) == 0 {
                [-2.0, -2.0]
            } else {
                [2.0, 2.0]
            };
            assert_eq!(d.feature(i), expected);
        }
    }

    #[test]
    fn classes_are_balanced_within_one() {
        for n in [4, 5, 99, 100] {
            let d = generate_synthetic(SyntheticKind::Spirals, n, 0.05, 1).unwrap();
            let c0 = (0..d.len()).filter(|&i| d.label(i) == 0).count();
            let c1 = d.len() - c0;
            assert!(c0.abs_diff(c1) <= 1, "n={n}: {c0} vs {c1}");
        }
    }

    #[test]
    fn same_seed_reproduces_the_dataset() {
        let a = generate_synthetic(SyntheticKind::TwoMoons, 60, 0.15, 17).unwrap();
        let b = generate_synthetic(SyntheticKind::TwoMoons, 60, 0.15, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_n_is_rejected() {
        assert!(generate_synthetic(SyntheticKind::Blobs, 3, 0.0, 1).is_err());
    }
}
