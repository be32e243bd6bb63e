//! Acceptance suite: one test per release criterion, each printing a
//! pass line (run with `--nocapture` to see them).
//!
//! Criteria 1-7 run against a shared two-moons fixture built through the
//! library; criterion 8 drives the installed binary end to end.

use std::time::{Duration, Instant};

use once_cell::sync::Lazy;
use rand::Rng;

use mutnet::analysis::{
    auroc, batch_lcr, calibrate, detect, kill_matrix, mutation_score, tune_epsilon,
    CalibrationOptions, KillMatrix, Verdict,
};
use mutnet::data::{generate_synthetic, Dataset, Split, SyntheticKind};
use mutnet::mutation::{
    apply_model_operator, generate_pool, ModelMutationKind, ModelMutationSpec, MutantRecord,
    PoolConfig, PoolStats,
};
use mutnet::nn::{train, Activation, Layer, Network, TrainingSpec};
use mutnet::pmt::{
    evaluate_pmt, extract_features, predict_killed, train_predictor, PmtTrainOptions,
};
use mutnet::rng;

struct Fixture {
    data: Dataset,
    network: Network,
    pool: Vec<MutantRecord>,
    stats: PoolStats,
    build_time: Duration,
}

fn epsilon_grid() -> Vec<f64> {
    (1..=24).map(|i| i as f64 * 0.025).collect()
}

static FIXTURE: Lazy<Fixture> = Lazy::new(|| {
    let start = Instant::now();
    let data = generate_synthetic(SyntheticKind::TwoMoons, 400, 0.10, 7)
        .unwrap()
        .with_splits([0.5, 0.2, 0.3], 7)
        .unwrap();
    let spec = TrainingSpec {
        hidden_sizes: vec![16],
        activations: vec![Activation::Relu],
        learning_rate: 0.5,
        epochs: 300,
        batch_size: 32,
        seed: 42,
        init_scale: 0.5,
    };
    let network = train(&spec, &data).unwrap();
    let op_mix = vec![
        ModelMutationSpec::new(ModelMutationKind::GaussianFuzz, 0.3, 1.5, 0),
        ModelMutationSpec::new(ModelMutationKind::WeightShuffle, 0.3, 1.0, 0),
        ModelMutationSpec::new(ModelMutationKind::NeuronSwitch, 0.1, 1.0, 0),
        ModelMutationSpec::new(ModelMutationKind::NeuronActivationInverse, 0.1, 1.0, 0),
    ];
    let cfg = PoolConfig {
        count: 200,
        quality_ratio: 0.9,
        gate_split: Split::Val,
        attempt_budget: 2000,
        base_seed: 1000,
    };
    let (pool, stats) = generate_pool(&network, &data, &op_mix, &cfg).unwrap();
    Fixture {
        data,
        network,
        pool,
        stats,
        build_time: start.elapsed(),
    }
});

/// Random valid network for the randomized operator trials.
fn random_network(trial: u64) -> Network {
    let mut r = rng::stream(0xacce97, "operator-trial", trial);
    let input_dim = r.random_range(1..=4usize);
    let class_count = r.random_range(2..=4usize);
    let depth = r.random_range(0..=2usize);
    let acts = [
        Activation::Relu,
        Activation::Tanh,
        Activation::Sigmoid,
        Activation::Identity,
    ];
    let mut dims = vec![input_dim];
    for _ in 0..depth {
        dims.push(r.random_range(1..=6usize));
    }
    dims.push(class_count);
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
    Network::new(input_dim, class_count, layers).unwrap()
}

fn same_architecture(a: &Network, b: &Network) -> bool {
    a.layers().len() == b.layers().len()
        && a.layers().iter().zip(b.layers()).all(|(la, lb)| {
            la.output_dim() == lb.output_dim()
                && la.input_dim() == lb.input_dim()
                && la.activation == lb.activation
        })
}

fn weight_multiset(net: &Network) -> Vec<u64> {
    let mut ws: Vec<u64> = net
        .layers()
        .iter()
        .flat_map(|l| l.weights.iter().flatten().map(|w| w.to_bits()))
        .collect();
    ws.sort_unstable();
    ws
}

#[test]
fn criterion_1_operator_algebra() {
    let trials = 520u64;
    let mut checks = 0usize;
    for trial in 0..trials {
        let net = random_network(trial);
        let mut r = rng::stream(0xacce97, "operator-params", trial);
        let gamma = r.random_range(0.01..=1.0);
        let seed = r.random::<u64>();

        // GF at vanishing sigma is numerically the identity
        let gf = ModelMutationSpec::new(ModelMutationKind::GaussianFuzz, gamma, 1e-300, seed);
        let fuzzed = apply_model_operator(&net, &gf).unwrap();
        assert!(same_architecture(&net, &fuzzed));
        for _ in 0..3 {
            let input: Vec<f64> = (0..net.input_dim())
                .map(|_| r.random_range(-3.0..3.0))
                .collect();
            let a = net.forward(&input).unwrap();
            let b = fuzzed.forward(&input).unwrap();
            for (pa, pb) in a.iter().zip(&b) {
                assert!(
                    (pa - pb).abs() <= 1e-9,
                    "trial {trial}: GF drift {}",
                    (pa - pb).abs()
                );
            }
            checks += 1;
        }

        // NAI and NS restore the exact network when applied twice
        for kind in [
            ModelMutationKind::NeuronActivationInverse,
            ModelMutationKind::NeuronSwitch,
        ] {
            let spec = ModelMutationSpec::new(kind, gamma, 1.0, seed);
            let once = apply_model_operator(&net, &spec).unwrap();
            assert!(
                same_architecture(&net, &once),
                "trial {trial}: {kind:?} shape"
            );
            let twice = apply_model_operator(&once, &spec).unwrap();
            assert_eq!(net, twice, "trial {trial}: {kind:?} is not an involution");
            checks += 1;
        }

        // WS and NS preserve the global weight multiset
        for kind in [
            ModelMutationKind::WeightShuffle,
            ModelMutationKind::NeuronSwitch,
        ] {
            let spec = ModelMutationSpec::new(kind, gamma, 1.0, seed);
            let mutated = apply_model_operator(&net, &spec).unwrap();
            assert!(
                same_architecture(&net, &mutated),
                "trial {trial}: {kind:?} shape"
            );
            assert_eq!(
                weight_multiset(&net),
                weight_multiset(&mutated),
                "trial {trial}: {kind:?} multiset"
            );
            checks += 1;
        }
    }
    println!(
        "[acceptance] criterion 1 (operator algebra): PASS \
         ({trials} randomized trials, {checks} checks, 100% pass)"
    );
}

#[test]
fn criterion_2_gradient_correctness() {
    const H: f64 = 1e-5;
    const TOL: f64 = 1e-4;
    let architectures = 25u64;
    for trial in 0..architectures {
        let net = random_network(1_000 + trial);
        let mut r = rng::stream(0xacce97, "gradient-batch", trial);
        let batch_size = r.random_range(3..=6usize);
        let inputs: Vec<Vec<f64>> = (0..batch_size)
            .map(|_| {
                (0..net.input_dim())
                    .map(|_| r.random_range(-2.0..2.0))
                    .collect()
            })
            .collect();
        let labels: Vec<usize> = (0..batch_size)
            .map(|_| r.random_range(0..net.class_count()))
            .collect();
        let batch: Vec<(&[f64], usize)> = inputs
            .iter()
            .map(Vec::as_slice)
            .zip(labels.iter().copied())
            .collect();

        let analytic = net.gradient(&batch).unwrap();
        for (l, layer) in net.layers().iter().enumerate() {
            for o in 0..layer.output_dim() {
                for i in 0..layer.input_dim() {
                    let numeric = {
                        let loss = |delta: f64| {
                            let mut ls = net.layers().to_vec();
                            ls[l].weights[o][i] += delta;
                            net.with_layers(ls).unwrap().batch_loss(&batch).unwrap()
                        };
                        (loss(H) - loss(-H)) / (2.0 * H)
                    };
                    let a = analytic.layers[l].weights[o][i];
                    let scale = a.abs().max(numeric.abs()).max(0.01);
                    assert!(
                        (a - numeric).abs() <= TOL * scale,
                        "trial {trial}: w[{l}][{o}][{i}] {a} vs {numeric}"
                    );
                }
                let numeric = {
                    let loss = |delta: f64| {
                        let mut ls = net.layers().to_vec();
                        ls[l].biases[o] += delta;
                        net.with_layers(ls).unwrap().batch_loss(&batch).unwrap()
                    };
                    (loss(H) - loss(-H)) / (2.0 * H)
                };
                let a = analytic.layers[l].biases[o];
                let scale = a.abs().max(numeric.abs()).max(0.01);
                assert!(
                    (a - numeric).abs() <= TOL * scale,
                    "trial {trial}: b[{l}][{o}] {a} vs {numeric}"
                );
            }
        }
    }
    println!(
        "[acceptance] criterion 2 (gradient correctness): PASS \
         ({architectures} random architectures vs central differences at 1e-4 relative)"
    );
}

#[test]
fn criterion_3_quality_gate() {
    let fx = &*FIXTURE;
    assert_eq!(
        fx.pool.len(),
        200,
        "pool must hold exactly 200 retained mutants"
    );
    let threshold = 0.9 * fx.stats.original_accuracy;
    for record in &fx.pool {
        let accuracy = record.network.accuracy(&fx.data, Split::Val).unwrap();
        assert_eq!(
            accuracy, record.accuracy,
            "mutant {} accuracy drifted",
            record.id
        );
        assert!(
            accuracy >= threshold,
            "mutant {} below gate: {accuracy} < {threshold}",
            record.id
        );
    }
    assert!(
        fx.build_time <= Duration::from_secs(60),
        "pool build took {:?}",
        fx.build_time
    );
    println!(
        "[acceptance] criterion 3 (quality gate): PASS \
         (200/200 mutants >= 0.9 x original on the gate split, built in {:?})",
        fx.build_time
    );
}

/// Fresh double loop with per-cell forward passes.
fn brute_force_kill(
    net: &Network,
    pool: &[MutantRecord],
    data: &Dataset,
    split: Split,
) -> KillMatrix {
    let test_indices = data.split_indices(split);
    let killed: Vec<Vec<bool>> = pool
        .iter()
        .map(|record| {
            test_indices
                .iter()
                .map(|&t| {
                    let original = net.predict_label(data.feature(t)).unwrap();
                    let correct = original == data.label(t);
                    correct && record.network.predict_label(data.feature(t)).unwrap() != original
                })
                .collect()
        })
        .collect();
    let pseudo_equivalent = killed.iter().map(|row| !row.iter().any(|&k| k)).collect();
    KillMatrix {
        mutant_ids: pool.iter().map(|r| r.id).collect(),
        test_indices,
        killed,
        pseudo_equivalent,
    }
}

#[test]
fn criterion_4_kill_score_oracle_equivalence() {
    let fx = &*FIXTURE;
    // 200 mutants x 120 tests, then 200 mutants x 200 train rows
    for split in [Split::Test, Split::Train] {
        let km = kill_matrix(&fx.network, &fx.pool, &fx.data, split).unwrap();
        let oracle = brute_force_kill(&fx.network, &fx.pool, &fx.data, split);
        assert_eq!(km, oracle, "kill matrix mismatch on {split}");

        let score = mutation_score(&km, false).unwrap();
        let oracle_killed = (0..oracle.mutant_ids.len())
            .filter(|&m| oracle.killed[m].iter().any(|&k| k))
            .count();
        assert_eq!(score, oracle_killed as f64 / oracle.mutant_ids.len() as f64);

        let excl = mutation_score(&km, true).unwrap();
        let pseudo = oracle.pseudo_equivalent.iter().filter(|&&p| p).count();
        assert_eq!(
            excl,
            oracle_killed as f64 / (oracle.mutant_ids.len() - pseudo) as f64
        );
    }
    println!(
        "[acceptance] criterion 4 (kill/score oracle equivalence): PASS \
         (exact match on 200x120 and 200x200 matrices)"
    );
}

#[test]
fn criterion_5_lcr_separation() {
    let start = Instant::now();
    let fx = &*FIXTURE;
    let sweep = tune_epsilon(&fx.network, &fx.data, Split::Val, &epsilon_grid(), 0.7).unwrap();
    let bounds = fx.data.feature_bounds();
    let rows: Vec<usize> = fx
        .data
        .split_indices(Split::Test)
        .into_iter()
        .filter(|&r| fx.network.predict_label(fx.data.feature(r)).unwrap() == fx.data.label(r))
        .collect();
    let clean: Vec<Vec<f64>> = rows.iter().map(|&r| fx.data.feature(r).to_vec()).collect();
    let adversarial: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| {
            mutnet::analysis::fgsm(
                &fx.network,
                fx.data.feature(r),
                fx.data.label(r),
                sweep.epsilon,
                &bounds,
            )
            .unwrap()
            .sample
        })
        .collect();
    let clean_lcr = batch_lcr(&clean, &fx.network, &fx.pool).unwrap();
    let adv_lcr = batch_lcr(&adversarial, &fx.network, &fx.pool).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (clean_mean, adv_mean) = (mean(&clean_lcr), mean(&adv_lcr));
    assert!(
        adv_mean > clean_mean,
        "no separation: adversarial {adv_mean} vs clean {clean_mean}"
    );
    let roc = auroc(&adv_lcr, &clean_lcr);
    assert!(roc >= 0.80, "AUROC {roc} below the 0.80 floor");

    let elapsed = FIXTURE.build_time + start.elapsed();
    assert!(
        elapsed <= Duration::from_secs(300),
        "end to end took {elapsed:?}"
    );
    println!(
        "[acceptance] criterion 5 (LCR separation): PASS \
         (clean mean {clean_mean:.4}, adversarial mean {adv_mean:.4}, AUROC {roc:.4}, \
         epsilon {} from the 70%-flip sweep, end-to-end {elapsed:?})",
        sweep.epsilon
    );
}

#[test]
fn criterion_6_sequential_detector() {
    let fx = &*FIXTURE;
    let train_rows = fx.data.split_indices(Split::Train);
    let normals: Vec<Vec<f64>> = train_rows
        .iter()
        .map(|&r| fx.data.feature(r).to_vec())
        .collect();
    let opts = CalibrationOptions {
        quantile: 0.95,
        p1_multiplier: 2.0,
        alpha: 0.05,
        beta: 0.05,
        max_mutants: None,
    };
    let sprt = calibrate(&normals, &fx.network, &fx.pool, &opts).unwrap();
    assert_eq!(sprt.max_mutants, fx.pool.len());

    // 200 mixed samples: 100 clean test + their FGSM counterparts
    let sweep = tune_epsilon(&fx.network, &fx.data, Split::Val, &epsilon_grid(), 0.7).unwrap();
    let bounds = fx.data.feature_bounds();
    let rows: Vec<usize> = fx
        .data
        .split_indices(Split::Test)
        .into_iter()
        .filter(|&r| fx.network.predict_label(fx.data.feature(r)).unwrap() == fx.data.label(r))
        .take(100)
        .collect();
    let mut mixed: Vec<Vec<f64>> = rows.iter().map(|&r| fx.data.feature(r).to_vec()).collect();
    for &r in &rows {
        mixed.push(
            mutnet::analysis::fgsm(
                &fx.network,
                fx.data.feature(r),
                fx.data.label(r),
                sweep.epsilon,
                &bounds,
            )
            .unwrap()
            .sample,
        );
    }
    assert_eq!(mixed.len(), 200);

    let nets: Vec<&Network> = fx.pool.iter().map(|r| &r.network).collect();
    let midpoint = (sprt.p0 + sprt.p1) / 2.0;
    let mut agreements = 0usize;
    let mut total_evaluations = 0usize;
    for (i, sample) in mixed.iter().enumerate() {
        let report = detect(sample, &fx.network, nets.iter().copied(), &sprt, i).unwrap();
        assert!(report.mutants_evaluated <= sprt.max_mutants);
        total_evaluations += report.mutants_evaluated;
        let full_pool_lcr =
            batch_lcr(std::slice::from_ref(sample), &fx.network, &fx.pool).unwrap()[0];
        let fixed_budget = if full_pool_lcr >= midpoint {
            Verdict::Adversarial
        } else {
            Verdict::Normal
        };
        if report.verdict == fixed_budget {
            agreements += 1;
        }
    }
    let agreement_rate = agreements as f64 / mixed.len() as f64;
    let mean_evaluations = total_evaluations as f64 / mixed.len() as f64;
    assert!(
        agreement_rate >= 0.95,
        "agreement {agreement_rate} below 0.95 ({agreements}/200)"
    );
    assert!(
        mean_evaluations < fx.pool.len() as f64,
        "sequential testing saved nothing: {mean_evaluations}"
    );

    // false positives over the clean train population
    let mut false_positives = 0usize;
    for (i, sample) in normals.iter().enumerate() {
        let report = detect(sample, &fx.network, nets.iter().copied(), &sprt, i).unwrap();
        if report.verdict == Verdict::Adversarial {
            false_positives += 1;
        }
    }
    let fpr = false_positives as f64 / normals.len() as f64;
    assert!(
        fpr <= sprt.alpha + 0.05,
        "train FPR {fpr} above {}",
        sprt.alpha + 0.05
    );

    println!(
        "[acceptance] criterion 6 (sequential detector): PASS \
         (agreement {agreements}/200, mean {mean_evaluations:.1} of {} mutant evaluations, \
         clean-train FPR {fpr:.4} <= {:.2})",
        fx.pool.len(),
        sprt.alpha + 0.05
    );
}

#[test]
fn criterion_7_pmt() {
    let fx = &*FIXTURE;
    let km = kill_matrix(&fx.network, &fx.pool, &fx.data, Split::Test).unwrap();
    let killed: Vec<bool> = (0..km.mutant_count()).map(|m| km.row_killed(m)).collect();
    let features: Vec<_> = fx
        .pool
        .iter()
        .map(|r| extract_features(r, &fx.network, fx.stats.original_accuracy).unwrap())
        .collect();

    let order = rng::shuffled_indices(fx.pool.len(), 99, "pmt-holdout");
    let holdout_size = fx.pool.len() * 3 / 10;
    let (holdout_idx, train_idx) = order.split_at(holdout_size);
    let train_features: Vec<_> = train_idx.iter().map(|&i| features[i].clone()).collect();
    let train_killed: Vec<bool> = train_idx.iter().map(|&i| killed[i]).collect();
    let holdout_truth: Vec<bool> = holdout_idx.iter().map(|&i| killed[i]).collect();

    let model =
        train_predictor(&train_features, &train_killed, &PmtTrainOptions::default()).unwrap();
    let predictions: Vec<bool> = holdout_idx
        .iter()
        .map(|&i| predict_killed(&model, &features[i]).unwrap().1)
        .collect();
    let metrics = evaluate_pmt(&predictions, &holdout_truth).unwrap();
    assert!(
        metrics.accuracy >= metrics.baseline_accuracy + 0.05,
        "holdout accuracy {} does not beat baseline {} by 0.05",
        metrics.accuracy,
        metrics.baseline_accuracy
    );

    // permutation control: shuffled labels must not look predictive
    let shuffled_order = rng::shuffled_indices(train_killed.len(), 99, "pmt-permutation");
    let shuffled_labels: Vec<bool> = shuffled_order.iter().map(|&i| train_killed[i]).collect();
    let null_model = train_predictor(
        &train_features,
        &shuffled_labels,
        &PmtTrainOptions::default(),
    )
    .unwrap();
    let null_predictions: Vec<bool> = holdout_idx
        .iter()
        .map(|&i| predict_killed(&null_model, &features[i]).unwrap().1)
        .collect();
    let null_metrics = evaluate_pmt(&null_predictions, &holdout_truth).unwrap();
    assert!(
        (null_metrics.accuracy - null_metrics.baseline_accuracy).abs() <= 0.1,
        "permutation control accuracy {} strays from baseline {}",
        null_metrics.accuracy,
        null_metrics.baseline_accuracy
    );

    println!(
        "[acceptance] criterion 7 (predictive mutation testing): PASS \
         (holdout {:.4} vs baseline {:.4}, permutation control {:.4})",
        metrics.accuracy, metrics.baseline_accuracy, null_metrics.accuracy
    );
}

#[test]
fn criterion_8_cli_reproducibility() {
    use std::fs;
    use std::process::Command;

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("campaign");
    let out_s = out.to_string_lossy().into_owned();
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/two_moons.toml");

    // deterministic samples file shared by both runs
    let fx = &*FIXTURE;
    let sweep = tune_epsilon(&fx.network, &fx.data, Split::Val, &epsilon_grid(), 0.7).unwrap();
    let bounds = fx.data.feature_bounds();
    let rows: Vec<usize> = fx
        .data
        .split_indices(Split::Test)
        .into_iter()
        .filter(|&r| fx.network.predict_label(fx.data.feature(r)).unwrap() == fx.data.label(r))
        .take(40)
        .collect();
    let mut samples: Vec<Vec<f64>> = rows.iter().map(|&r| fx.data.feature(r).to_vec()).collect();
    let mut truth = vec![false; samples.len()];
    for &r in rows.iter().take(20) {
        samples.push(
            mutnet::analysis::fgsm(
                &fx.network,
                fx.data.feature(r),
                fx.data.label(r),
                sweep.epsilon,
                &bounds,
            )
            .unwrap()
            .sample,
        );
        truth.push(true);
    }
    let samples_path = dir.path().join("samples.json");
    fs::write(
        &samples_path,
        serde_json::to_string_pretty(&serde_json::json!({
            "schema_version": 1,
            "samples": samples,
            "adversarial": truth,
        }))
        .unwrap(),
    )
    .unwrap();
    let samples_s = samples_path.to_string_lossy().into_owned();

    let run_all = || {
        let commands: Vec<Vec<&str>> = vec![
            vec!["train"],
            vec![
                "mutate-data",
                "--kind",
                "label_error",
                "--rate",
                "0.25",
                "--mutation-seed",
                "11",
            ],
            vec!["mutate-source"],
            vec!["mutate-model"],
            vec!["score", "--verify"],
            vec!["detect", "--samples", &samples_s],
            vec!["pmt"],
            vec!["report"],
        ];
        for args in commands {
            let output = Command::new(env!("CARGO_BIN_EXE_mutnet"))
                .args(&args)
                .args(["--config", config, "--out", &out_s])
                .output()
                .expect("binary runs");
            assert!(
                output.status.success(),
                "{args:?} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
        }
    };

    let snapshot = |root: &std::path::Path| -> Vec<(String, Vec<u8>)> {
        fn walk(dir: &std::path::Path, root: &std::path::Path, acc: &mut Vec<(String, Vec<u8>)>) {
            for entry in fs::read_dir(dir).unwrap() {
                let path = entry.unwrap().path();
                if path.is_dir() {
                    walk(&path, root, acc);
                } else {
                    let rel = path
                        .strip_prefix(root)
                        .unwrap()
                        .to_string_lossy()
                        .into_owned();
                    acc.push((rel, fs::read(&path).unwrap()));
                }
            }
        }
        let mut acc = Vec::new();
        walk(root, root, &mut acc);
        acc.sort();
        acc
    };

    run_all();
    let first = snapshot(&out);
    assert!(
        first.len() >= 12,
        "expected a full artifact set, got {}",
        first.len()
    );
    run_all();
    let second = snapshot(&out);

    assert_eq!(first.len(), second.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in first.iter().zip(&second) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "artifact {name_a} changed across reruns");
    }
    println!(
        "[acceptance] criterion 8 (CLI reproducibility): PASS \
         ({} artifacts byte-identical across full campaign reruns)",
        first.len()
    );
}
