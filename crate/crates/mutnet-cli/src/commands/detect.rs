//! `mutnet detect`

use std::path::Path;

use rayon::prelude::*;

use mutnet::analysis::{calibrate, detect, Verdict};
use mutnet::data::Split;
use mutnet::mutation::read_pool_archive;
use mutnet::nn::Network;

use crate::artifacts::{
    read_json, write_json, DetectionReport, DetectionRow, DetectionSummary, OutputLock, SamplesFile,
};
use crate::commands::{default_path, load_dataset, load_network};
use crate::config::CampaignConfig;
use crate::exit::CliError;

pub fn run(
    config: &CampaignConfig,
    pool: Option<&Path>,
    model: Option<&Path>,
    dataset: Option<&Path>,
    samples_path: &Path,
) -> Result<(), CliError> {
    let out = &config.output.dir;
    let _lock = OutputLock::acquire(out)?;

    let network = load_network(&default_path(model, config, "model.json"))?;
    let data = load_dataset(&default_path(dataset, config, "dataset.json"))?;
    let (records, _) = read_pool_archive(default_path(pool, config, "pool"))?;

    let samples: SamplesFile = read_json(samples_path)?;
    if samples.samples.is_empty() {
        return Err(CliError::data("empty samples file"));
    }
    if let Some(truth) = &samples.adversarial {
        if truth.len() != samples.samples.len() {
            return Err(CliError::data(
                "adversarial flags do not match the sample count",
            ));
        }
    }

    // calibrate against the train split as the normal population
    let train_rows = data.split_indices(Split::Train);
    let normals: Vec<Vec<f64>> = train_rows
        .iter()
        .map(|&r| data.feature(r).to_vec())
        .collect();
    let mut opts = config.detection.calibration_options();
    opts.max_mutants = Some(opts.max_mutants.unwrap_or(records.len()).min(records.len()));
    let sprt = calibrate(&normals, &network, &records, &opts)?;

    let nets: Vec<&Network> = records.iter().map(|r| &r.network).collect();
    let rows: Vec<DetectionRow> = samples
        .samples
        .par_iter()
        .enumerate()
        .map(|(i, sample)| {
            let report = detect(sample, &network, nets.iter().copied(), &sprt, i)?;
            Ok(DetectionRow {
                report,
                truth_adversarial: samples.adversarial.as_ref().map(|t| t[i]),
            })
        })
        .collect::<Result<_, mutnet::Error>>()?;

    let count = |v: Verdict| rows.iter().filter(|r| r.report.verdict == v).count();
    let mean_evals = rows
        .iter()
        .map(|r| r.report.mutants_evaluated)
        .sum::<usize>() as f64
        / rows.len() as f64;
    let (tpr, fpr) = match &samples.adversarial {
        Some(_) => {
            let pos = rows.iter().filter(|r| r.truth_adversarial == Some(true));
            let neg = rows.iter().filter(|r| r.truth_adversarial == Some(false));
            let (pos_n, pos_hit) = pos.fold((0usize, 0usize), |(n, h), r| {
                (
                    n + 1,
                    h + usize::from(r.report.verdict == Verdict::Adversarial),
                )
            });
            let (neg_n, neg_hit) = neg.fold((0usize, 0usize), |(n, h), r| {
                (
                    n + 1,
                    h + usize::from(r.report.verdict == Verdict::Adversarial),
                )
            });
            (
                (pos_n > 0).then(|| pos_hit as f64 / pos_n as f64),
                (neg_n > 0).then(|| neg_hit as f64 / neg_n as f64),
            )
        }
        None => (None, None),
    };

    let summary = DetectionSummary {
        samples: rows.len(),
        normal: count(Verdict::Normal),
        adversarial: count(Verdict::Adversarial),
        undecided: count(Verdict::Undecided),
        forced: rows.iter().filter(|r| r.report.forced).count(),
        mean_mutants_evaluated: mean_evals,
        true_positive_rate: tpr,
        false_positive_rate: fpr,
    };
    println!(
        "detected {} adversarial / {} normal / {} undecided over {} samples \
         (mean {:.1} mutants evaluated, p0 {:.4}, p1 {:.4})",
        summary.adversarial,
        summary.normal,
        summary.undecided,
        summary.samples,
        summary.mean_mutants_evaluated,
        sprt.p0,
        sprt.p1
    );

    let report = DetectionReport {
        schema_version: 1,
        config: config.echo(),
        sprt,
        per_sample: rows,
        summary,
    };
    write_json(&out.join("detection_report.json"), &report)?;
    println!("wrote {}", out.join("detection_report.json").display());
    Ok(())
}
