//! Label change rate of a sample over a mutant pool.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mutation::MutantRecord;
use crate::nn::Network;

/// Fraction of pool mutants whose label for `sample` differs from the
/// original model's label. The reference is the original's prediction,
/// not ground truth.
pub fn lcr(sample: &[f64], original: &Network, pool: &[MutantRecord]) -> Result<f64> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let reference = original.predict_label(sample)?;
    let mut changes = 0usize;
    for record in pool {
        if record.network.predict_label(sample)? != reference {
            changes += 1;
        }
    }
    Ok(changes as f64 / pool.len() as f64)
}

/// LCR for each sample, evaluated in parallel, output in sample order.
pub fn batch_lcr(
    samples: &[Vec<f64>],
    original: &Network,
    pool: &[MutantRecord],
) -> Result<Vec<f64>> {
    samples.par_iter().map(|s| lcr(s, original, pool)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::{ModelMutationKind, ModelMutationSpec, MutantOrigin, OperatorDescriptor};
    use crate::nn::{Activation, Layer};

    fn record(id: usize, network: Network) -> MutantRecord {
        MutantRecord {
            id,
            origin: MutantOrigin::ModelLevel,
            operator: OperatorDescriptor::Model(ModelMutationSpec::new(
                ModelMutationKind::NeuronActivationInverse,
                0.5,
                1.0,
                id as u64,
            )),
            network,
            accuracy: 1.0,
            retained: true,
        }
    }

    fn confident_two_class_net() -> Network {
        Network::new(
            2,
            2,
            vec![Layer::new(
                vec![vec![2.0, 0.0], vec![-2.0, 0.0]],
                vec![0.0, 0.0],
                Activation::SoftmaxOutput,
            )],
        )
        .unwrap()
    }

    #[test]
    fn pool_of_originals_has_zero_lcr() {
        let net = confident_two_class_net();
        let pool: Vec<MutantRecord> = (0..5).map(|i| record(i, net.clone())).collect();
        let value = lcr(&[1.0, 0.3], &net, &pool).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn logit_negating_pool_flips_every_label() {
        let net = confident_two_class_net();
        let negated = {
            let mut layers = net.layers().to_vec();
            for row in &mut layers[0].weights {
                for w in row {
                    *w = -*w;
                }
            }
            net.with_layers(layers).unwrap()
        };
        let pool: Vec<MutantRecord> = (0..4).map(|i| record(i, negated.clone())).collect();
        let value = lcr(&[1.0, 0.0], &net, &pool).unwrap();
        assert_eq!(value, 1.0);
    }

    #[test]
    fn empty_pool_is_an_error() {
        let net = confident_two_class_net();
        assert!(matches!(lcr(&[0.0, 0.0], &net, &[]), Err(Error::EmptyPool)));
    }

    #[test]
    fn batch_matches_singles() {
        let net = confident_two_class_net();
        let pool: Vec<MutantRecord> = (0..3).map(|i| record(i, net.clone())).collect();
        let samples = vec![vec![1.0, 0.0], vec![-1.0, 2.0]];
        let batch = batch_lcr(&samples, &net, &pool).unwrap();
        for (s, &b) in samples.iter().zip(&batch) {
            assert_eq!(lcr(s, &net, &pool).unwrap(), b);
        }
    }
}
