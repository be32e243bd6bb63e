//! `mutnet report`

use serde::{Deserialize, Serialize};

use crate::artifacts::{
    read_json, write_json, DetectionReport, MetricsReport, OutputLock, PmtReport, ScoreReport,
};
use crate::config::CampaignConfig;
use crate::exit::CliError;

#[derive(Serialize, Deserialize)]
struct CampaignReport {
    schema_version: u32,
    config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<MetricsSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pool: Option<PoolSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<ScoreSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detection: Option<crate::artifacts::DetectionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pmt: Option<PmtSummary>,
}

#[derive(Serialize, Deserialize)]
struct MetricsSummary {
    train_accuracy: f64,
    val_accuracy: f64,
    test_accuracy: f64,
}

#[derive(Serialize, Deserialize)]
struct PoolSummary {
    retained: usize,
    attempts: usize,
    original_accuracy: f64,
    threshold: f64,
}

#[derive(Serialize, Deserialize)]
struct ScoreSummary {
    split: String,
    mutants: usize,
    killed_mutants: usize,
    mutation_score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mutation_score_excluding_pseudo_equivalent: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct PmtSummary {
    holdout_metrics: mutnet::pmt::PmtMetrics,
    executions_avoided: usize,
}

pub fn run(config: &CampaignConfig) -> Result<(), CliError> {
    let out = &config.output.dir;
    let _lock = OutputLock::acquire(out)?;

    let metrics = read_json::<MetricsReport>(&out.join("metrics.json"))
        .ok()
        .map(|m| MetricsSummary {
            train_accuracy: m.train_accuracy,
            val_accuracy: m.val_accuracy,
            test_accuracy: m.test_accuracy,
        });
    let pool = read_json::<mutnet::mutation::PoolArchive>(&out.join("pool/pool.json"))
        .ok()
        .map(|a| PoolSummary {
            retained: a.stats.retained,
            attempts: a.stats.attempts,
            original_accuracy: a.stats.original_accuracy,
            threshold: a.stats.threshold,
        });
    let score = read_json::<ScoreReport>(&out.join("score_report.json"))
        .ok()
        .map(|s| ScoreSummary {
            split: s.split,
            mutants: s.mutant_ids.len(),
            killed_mutants: s.killed_mutants,
            mutation_score: s.mutation_score,
            mutation_score_excluding_pseudo_equivalent: s
                .mutation_score_excluding_pseudo_equivalent,
        });
    let detection = read_json::<DetectionReport>(&out.join("detection_report.json"))
        .ok()
        .map(|d| d.summary);
    let pmt = read_json::<PmtReport>(&out.join("pmt_report.json"))
        .ok()
        .map(|p| PmtSummary {
            holdout_metrics: p.holdout_metrics,
            executions_avoided: p.executions_avoided,
        });

    let report = CampaignReport {
        schema_version: 1,
        config: config.echo(),
        metrics,
        pool,
        score,
        detection,
        pmt,
    };
    write_json(&out.join("report.json"), &report)?;
    println!("wrote {}", out.join("report.json").display());
    Ok(())
}
