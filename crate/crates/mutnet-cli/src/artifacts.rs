//! Output directory handling and artifact schemas.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::exit::CliError;

/// Exclusive ownership of an output directory for the command's lifetime.
///
/// A leftover `.lock` from a crashed run must be removed by hand; that is
/// preferable to silently sharing a directory between two campaigns.
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<OutputLock, CliError> {
        fs::create_dir_all(dir)?;
        let path = dir.join(".lock");
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(_) => Ok(OutputLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(CliError::config(format!(
                    "output directory {} is locked (stale .lock?)",
                    dir.display()
                )))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Writes pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("invalid JSON in {}: {e}", path.display())))
}

/// Input samples for `detect`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplesFile {
    #[serde(default = "one")]
    pub schema_version: u32,
    pub samples: Vec<Vec<f64>>,
    /// Optional ground truth: true marks an adversarial sample.
    #[serde(default)]
    pub adversarial: Option<Vec<bool>>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub train_accuracy: f64,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreReport {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub split: String,
    pub mutant_ids: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// One little-endian bitset per mutant, base64.
    pub kill_rows_base64: Vec<String>,
    pub pseudo_equivalent: Vec<bool>,
    pub killed_mutants: usize,
    pub mutation_score: f64,
    pub mutation_score_excluding_pseudo_equivalent: Option<f64>,
    /// Present when --verify ran the brute-force oracle.
    pub verified: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionReport {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub sprt: mutnet::analysis::SprtConfig,
    pub per_sample: Vec<DetectionRow>,
    pub summary: DetectionSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionRow {
    #[serde(flatten)]
    pub report: mutnet::analysis::LcrReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_adversarial: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub samples: usize,
    pub normal: usize,
    pub adversarial: usize,
    pub undecided: usize,
    pub forced: usize,
    pub mean_mutants_evaluated: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_positive_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub false_positive_rate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmtReport {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub pool_size: usize,
    pub train_size: usize,
    pub holdout_size: usize,
    pub holdout_metrics: mutnet::pmt::PmtMetrics,
    /// Mutant executions avoided: pool size times the unexecuted fraction.
    pub executions_avoided: usize,
    /// The gate-accuracy-drop feature needs one validation pass per
    /// mutant; flagged so consumers can discount it.
    pub uses_gate_accuracy_feature: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourcePoolReport {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub baseline_accuracy: f64,
    pub mutants: usize,
    pub retained: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataMutationReport {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub operator: mutnet::data::DataMutationSpec,
    pub rows_before: usize,
    pub rows_after: usize,
    pub output_dataset: String,
}
