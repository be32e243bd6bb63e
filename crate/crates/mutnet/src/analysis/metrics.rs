//! Ranking metrics for detector evaluation.

/// Area under the ROC curve for positive vs negative score samples.
///
/// Rank-sum formulation with average ranks for ties; 0.5 means the scores
/// carry no signal, 1.0 means perfect separation.
pub fn auroc(positive_scores: &[f64], negative_scores: &[f64]) -> f64 {
    assert!(
        !positive_scores.is_empty() && !negative_scores.is_empty(),
        "auroc needs both classes"
    );
    let mut all: Vec<(f64, bool)> = positive_scores
        .iter()
        .map(|&s| (s, true))
        .chain(negative_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite scores"));

    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        // ranks are 1-based; tied values share the average rank
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for item in &all[i..=j] {
            if item.1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }

    let np = positive_scores.len() as f64;
    let nn = negative_scores.len() as f64;
    (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation_scores_one() {
        assert_eq!(auroc(&[0.9, 0.8, 0.7], &[0.1, 0.2, 0.3]), 1.0);
    }

    #[test]
    fn identical_distributions_score_half() {
        assert!((auroc(&[0.5, 0.5], &[0.5, 0.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reversed_scores_give_zero() {
        assert_eq!(auroc(&[0.1, 0.2], &[0.8, 0.9]), 0.0);
    }

    #[test]
    fn partial_overlap_matches_hand_count() {
        // positives {0.4, 0.8}, negatives {0.2, 0.6}
        // pairs won: (0.4>0.2), (0.8>0.2), (0.8>0.6) = 3 of 4
        assert!((auroc(&[0.4, 0.8], &[0.2, 0.6]) - 0.75).abs() < 1e-15);
    }
}
