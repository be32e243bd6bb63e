//! Property tests for the core invariants.

use mutnet::data::{
    generate_synthetic, mutate_data, DataMutationKind, DataMutationSpec, Split, SyntheticKind,
};
use mutnet::mutation::{apply_model_operator, ModelMutationKind, ModelMutationSpec};
use mutnet::nn::{Activation, Layer, Network};
use proptest::prelude::*;

/// Strategy: a random valid network with 0-2 hidden layers.
fn arb_network() -> impl Strategy<Value = Network> {
    (
        1usize..=4,                               // input_dim
        2usize..=4,                               // class_count
        prop::collection::vec(1usize..=5, 0..=2), // hidden widths
        any::<u64>(),
    )
        .prop_map(|(input_dim, class_count, hidden, seed)| {
            let mut r = mutnet::rng::stream(seed, "proptest-net", 0);
            use rand::Rng;
            let mut dims = vec![input_dim];
            dims.extend(&hidden);
            dims.push(class_count);
            let acts = [
                Activation::Relu,
                Activation::Tanh,
                Activation::Sigmoid,
                Activation::Identity,
            ];
            let layers: Vec<Layer> = (0..dims.len() - 1)
                .map(|l| {
                    let act = if l == dims.len() - 2 {
                        Activation::SoftmaxOutput
                    } else {
                        acts[r.random_range(0..acts.len())]
                    };
                    Layer::new(
                        (0..dims[l + 1])
                            .map(|_| (0..dims[l]).map(|_| r.random_range(-2.0..2.0)).collect())
                            .collect(),
                        (0..dims[l + 1])
                            .map(|_| r.random_range(-1.0..1.0))
                            .collect(),
                        act,
                    )
                })
                .collect();
            Network::new(input_dim, class_count, layers).expect("generated net is valid")
        })
}

proptest! {
    #[test]
    fn forward_output_is_a_probability_simplex(
        net in arb_network(),
        raw in prop::collection::vec(-1e3f64..1e3, 1..=4),
        ) {
        let mut input = raw;
        input.resize(net.input_dim(), 0.25);
        let probs = net.forward(&input).unwrap();
        prop_assert_eq!(probs.len(), net.class_count());
        let sum: f64 = probs.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9, "sum {}", sum);
        prop_assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn serialization_round_trip_preserves_forward_outputs(net in arb_network(), seed in any::<u64>()) {
        let restored = Network::from_json(&net.to_json()).unwrap();
        let mut r = mutnet::rng::stream(seed, "roundtrip-probe", 0);
        use rand::Rng;
        for _ in 0..100 {
            let input: Vec<f64> = (0..net.input_dim()).map(|_| r.random_range(-10.0..10.0)).collect();
            let a = net.forward(&input).unwrap();
            let b = restored.forward(&input).unwrap();
            for (pa, pb) in a.iter().zip(&b) {
                prop_assert!((pa - pb).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn model_operators_preserve_architecture_and_multisets(
        net in arb_network(),
        kind_idx in 0usize..4,
        gamma in 0.01f64..=1.0,
        sigma in 0.01f64..=2.0,
        seed in any::<u64>(),
    ) {
        let kind = ModelMutationKind::ALL[kind_idx];
        let spec = ModelMutationSpec::new(kind, gamma, sigma, seed);
        let out = apply_model_operator(&net, &spec).unwrap();

        // architecture preserved
        prop_assert_eq!(net.layers().len(), out.layers().len());
        for (a, b) in net.layers().iter().zip(out.layers()) {
            prop_assert_eq!(a.output_dim(), b.output_dim());
            prop_assert_eq!(a.input_dim(), b.input_dim());
            prop_assert_eq!(a.activation, b.activation);
        }

        // WS and NS preserve the global weight multiset
        if matches!(kind, ModelMutationKind::WeightShuffle | ModelMutationKind::NeuronSwitch) {
            let mut before: Vec<u64> = net
                .layers()
                .iter()
                .flat_map(|l| l.weights.iter().flatten().map(|w| w.to_bits()))
                .collect();
            let mut after: Vec<u64> = out
                .layers()
                .iter()
                .flat_map(|l| l.weights.iter().flatten().map(|w| w.to_bits()))
                .collect();
            before.sort_unstable();
            after.sort_unstable();
            prop_assert_eq!(before, after);
        }

        // NS and NAI are involutions for a fixed seed
        if matches!(kind, ModelMutationKind::NeuronSwitch | ModelMutationKind::NeuronActivationInverse) {
            let back = apply_model_operator(&out, &spec).unwrap();
            prop_assert_eq!(&net, &back);
        }
    }

    #[test]
    fn data_mutation_leaves_val_and_test_bytes_alone(
        kind_idx in 0usize..5,
        rate in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let kind = DataMutationKind::ALL[kind_idx];
        let rate = if kind == DataMutationKind::DataMissing { rate.min(0.9) } else { rate };
        let data = generate_synthetic(SyntheticKind::TwoMoons, 30, 0.1, 3)
            .unwrap()
            .with_splits([0.5, 0.25, 0.25], 3)
            .unwrap();
        let spec = DataMutationSpec { kind, rate, sigma: 0.3, seed };
        let out = mutate_data(&data, &spec).unwrap();

        let snapshot = |d: &mutnet::data::Dataset| -> Vec<(Vec<u64>, usize, Split)> {
            (0..d.len())
                .filter(|&i| d.split_tag(i) != Split::Train)
                .map(|i| {
                    (
                        d.feature(i).iter().map(|v| v.to_bits()).collect(),
                        d.label(i),
                        d.split_tag(i),
                    )
                })
                .collect()
        };
        prop_assert_eq!(snapshot(&data), snapshot(&out));

        // selection reproducibility
        let again = mutate_data(&data, &spec).unwrap();
        prop_assert_eq!(out, again);
    }
}
