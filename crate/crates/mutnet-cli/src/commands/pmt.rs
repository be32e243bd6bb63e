//! `mutnet pmt`

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use mutnet::analysis::KillMatrix;
use mutnet::pmt::{
    evaluate_pmt, extract_features, predict_killed, train_predictor, MutantFeatures, PmtModel,
    PmtTrainOptions,
};

use crate::artifacts::{read_json, write_json, OutputLock, PmtReport, ScoreReport};
use crate::commands::{default_path, load_dataset, load_network};
use crate::config::CampaignConfig;
use crate::exit::CliError;

#[derive(Serialize)]
struct PmtModelFile<'a> {
    schema_version: u32,
    config: &'a serde_json::Value,
    #[serde(flatten)]
    model: &'a PmtModel,
}

pub fn run(
    config: &CampaignConfig,
    pool: Option<&Path>,
    model: Option<&Path>,
    dataset: Option<&Path>,
    kill: Option<&Path>,
) -> Result<(), CliError> {
    let out = &config.output.dir;
    let _lock = OutputLock::acquire(out)?;

    let network = load_network(&default_path(model, config, "model.json"))?;
    let _data = load_dataset(&default_path(dataset, config, "dataset.json"))?;
    let (records, archive) =
        mutnet::mutation::read_pool_archive(default_path(pool, config, "pool"))?;
    if records.len() < 20 {
        return Err(CliError::config(format!(
            "insufficient mutants: need at least 20, pool has {}",
            records.len()
        )));
    }

    // killed/survived ground truth comes from the kill report
    let kill_report: ScoreReport = read_json(&default_path(kill, config, "score_report.json"))?;
    if kill_report.mutant_ids != records.iter().map(|r| r.id).collect::<Vec<_>>() {
        return Err(CliError::data(
            "kill report does not match the pool (mutant ids differ)",
        ));
    }
    let test_count = kill_report.test_indices.len();
    let killed: Vec<bool> = kill_report
        .kill_rows_base64
        .iter()
        .map(|row| {
            KillMatrix::row_from_bitset_base64(row, test_count).map(|bits| bits.iter().any(|&b| b))
        })
        .collect::<Result<_, mutnet::Error>>()?;

    let baseline_accuracy = archive.stats.original_accuracy;
    let features: Vec<MutantFeatures> = records
        .iter()
        .map(|r| extract_features(r, &network, baseline_accuracy))
        .collect::<Result<_, mutnet::Error>>()?;

    // seeded holdout split
    let order = mutnet::rng::shuffled_indices(records.len(), config.pmt.seed, "pmt-holdout");
    let holdout_size = ((config.pmt.holdout_fraction * records.len() as f64).round() as usize)
        .clamp(1, records.len() - 1);
    let (holdout_idx, train_idx) = order.split_at(holdout_size);

    let train_features: Vec<MutantFeatures> =
        train_idx.iter().map(|&i| features[i].clone()).collect();
    let train_killed: Vec<bool> = train_idx.iter().map(|&i| killed[i]).collect();
    let opts = PmtTrainOptions {
        seed: config.pmt.seed,
        epochs: config.pmt.epochs,
        learning_rate: config.pmt.learning_rate,
    };
    let predictor = train_predictor(&train_features, &train_killed, &opts)?;

    let holdout_predictions: Vec<bool> = holdout_idx
        .iter()
        .map(|&i| predict_killed(&predictor, &features[i]).map(|(_, p)| p))
        .collect::<Result<_, mutnet::Error>>()?;
    let holdout_truth: Vec<bool> = holdout_idx.iter().map(|&i| killed[i]).collect();
    let holdout_metrics = evaluate_pmt(&holdout_predictions, &holdout_truth)?;

    // artifacts: model json, feature table, per-mutant predictions
    let echo = config.echo();
    write_json(
        &out.join("pmt_model.json"),
        &PmtModelFile {
            schema_version: 1,
            config: &echo,
            model: &predictor,
        },
    )?;

    let mut feature_csv = String::from("mutant_id");
    for column in MutantFeatures::csv_columns() {
        write!(feature_csv, ",{column}").expect("string write");
    }
    feature_csv.push_str(",killed\n");
    for (record, (f, k)) in records.iter().zip(features.iter().zip(&killed)) {
        write!(feature_csv, "{}", record.id).expect("string write");
        for v in f.to_vec() {
            write!(feature_csv, ",{v}").expect("string write");
        }
        writeln!(feature_csv, ",{k}").expect("string write");
    }
    std::fs::write(out.join("features.csv"), feature_csv)?;

    let mut pred_csv = String::from("mutant_id,role,probability,predicted,killed\n");
    let role_of = |i: usize| {
        if holdout_idx.contains(&i) {
            "holdout"
        } else {
            "train"
        }
    };
    for (i, record) in records.iter().enumerate() {
        let (p, predicted) = predict_killed(&predictor, &features[i])?;
        writeln!(
            pred_csv,
            "{},{},{p},{predicted},{}",
            record.id,
            role_of(i),
            killed[i]
        )
        .expect("string write");
    }
    std::fs::write(out.join("predictions.csv"), pred_csv)?;

    let report = PmtReport {
        schema_version: 1,
        config: echo,
        pool_size: records.len(),
        train_size: train_idx.len(),
        holdout_size: holdout_idx.len(),
        holdout_metrics,
        executions_avoided: holdout_idx.len(),
        uses_gate_accuracy_feature: true,
    };
    write_json(&out.join("pmt_report.json"), &report)?;

    println!(
        "pmt holdout accuracy {:.4} (baseline {:.4}, precision {:.4}, recall {:.4}); \
         {} executions avoided",
        report.holdout_metrics.accuracy,
        report.holdout_metrics.baseline_accuracy,
        report.holdout_metrics.precision,
        report.holdout_metrics.recall,
        report.executions_avoided
    );
    println!("wrote {}", out.join("pmt_report.json").display());
    Ok(())
}
