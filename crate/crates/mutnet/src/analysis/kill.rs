//! Kill-matrix construction and mutation score.

use base64::Engine;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::mutation::MutantRecord;
use crate::nn::Network;

/// Boolean mutant-by-test kill outcomes.
///
/// `killed[m][t]` is true when the original classifies test `t` correctly
/// and mutant `m` assigns it a different label than the original does.
/// A mutant with an all-false row is flagged pseudo-equivalent; that is a
/// behavioral judgement over this split, not a semantic equivalence proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillMatrix {
    pub mutant_ids: Vec<usize>,
    /// Dataset row indices of the evaluated split, in dataset order.
    pub test_indices: Vec<usize>,
    pub killed: Vec<Vec<bool>>,
    pub pseudo_equivalent: Vec<bool>,
}

impl KillMatrix {
    pub fn mutant_count(&self) -> usize {
        self.mutant_ids.len()
    }

    /// True when any test kills mutant row `m`.
    pub fn row_killed(&self, m: usize) -> bool {
        self.killed[m].iter().any(|&k| k)
    }

    /// Per-mutant row packed little-endian, bit `t % 8` of byte `t / 8`.
    pub fn row_bitset_base64(&self, m: usize) -> String {
        let row = &self.killed[m];
        let mut bytes = vec![0u8; row.len().div_ceil(8)];
        for (t, &k) in row.iter().enumerate() {
            if k {
                bytes[t / 8] |= 1 << (t % 8);
            }
        }
        base64::engine::general_purpose::STANDARD.encode(bytes)
    }

    /// Inverse of [`Self::row_bitset_base64`].
    pub fn row_from_bitset_base64(encoded: &str, test_count: usize) -> Result<Vec<bool>> {
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(encoded)
            .map_err(|e| Error::InvalidSpec(format!("bad kill-row encoding: {e}")))?;
        if bytes.len() != test_count.div_ceil(8) {
            return Err(Error::DimensionMismatch {
                context: "kill-row bitset length",
                expected: test_count.div_ceil(8),
                actual: bytes.len(),
            });
        }
        Ok((0..test_count)
            .map(|t| bytes[t / 8] & (1 << (t % 8)) != 0)
            .collect())
    }
}

/// Builds the kill matrix of `pool` against the given split.
pub fn kill_matrix(
    original: &Network,
    pool: &[MutantRecord],
    data: &Dataset,
    split: Split,
) -> Result<KillMatrix> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let test_indices = data.split_indices(split);
    if test_indices.is_empty() {
        return Err(Error::EmptySplit(split));
    }

    // a kill requires the original to be right on the test sample
    let reference: Vec<(usize, bool)> = test_indices
        .iter()
        .map(|&row| {
            let label = original.predict_label(data.feature(row))?;
            Ok((label, label == data.label(row)))
        })
        .collect::<Result<_>>()?;

    let killed: Vec<Vec<bool>> = pool
        .par_iter()
        .map(|record| {
            test_indices
                .iter()
                .zip(&reference)
                .map(|(&row, &(ref_label, correct))| {
                    if !correct {
                        return Ok(false);
                    }
                    Ok(record.network.predict_label(data.feature(row))? != ref_label)
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<_>>()?;

    let pseudo_equivalent = killed.iter().map(|row| !row.iter().any(|&k| k)).collect();
    Ok(KillMatrix {
        mutant_ids: pool.iter().map(|r| r.id).collect(),
        test_indices,
        killed,
        pseudo_equivalent,
    })
}

/// Ratio of killed mutants to scorable mutants.
///
/// With `exclude_pseudo_equivalent` the denominator drops mutants no test
/// distinguishes from the original; if that empties the denominator the
/// score is undefined and an error is returned.
pub fn mutation_score(km: &KillMatrix, exclude_pseudo_equivalent: bool) -> Result<f64> {
    let total = km.mutant_count();
    if total == 0 {
        return Err(Error::EmptyPool);
    }
    let killed = (0..total).filter(|&m| km.row_killed(m)).count();
    let denominator = if exclude_pseudo_equivalent {
        total - km.pseudo_equivalent.iter().filter(|&&p| p).count()
    } else {
        total
    };
    if denominator == 0 {
        return Err(Error::NoScorableMutants);
    }
    Ok(killed as f64 / denominator as f64)
}
