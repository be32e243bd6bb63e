//! Campaign configuration: one declarative TOML file, overridable by
//! command-line flags (flags win).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mutnet::data::{DataMutationSpec, Split};
use mutnet::mutation::{ModelMutationKind, ModelMutationSpec, ProgramMutationSpec};
use mutnet::nn::{Activation, TrainingSpec};

use crate::exit::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub dataset: DatasetConfig,
    pub training: TrainingConfig,
    #[serde(default)]
    pub mutation: MutationConfig,
    #[serde(default)]
    pub detection: DetectionConfig,
    #[serde(default)]
    pub pmt: PmtConfig,
    #[serde(default)]
    pub source_mutation: SourceMutationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_schema_version() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// blobs | two_moons | spirals | csv
    pub kind: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_noise")]
    pub noise: f64,
    pub seed: u64,
    #[serde(default = "default_fractions")]
    pub fractions: [f64; 3],
    /// csv only
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// csv only
    #[serde(default)]
    pub label_column: Option<String>,
}

fn default_n() -> usize {
    400
}

fn default_noise() -> f64 {
    0.1
}

fn default_fractions() -> [f64; 3] {
    [0.5, 0.2, 0.3]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub hidden_sizes: Vec<usize>,
    pub activations: Vec<Activation>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl TrainingConfig {
    pub fn to_spec(&self) -> TrainingSpec {
        TrainingSpec {
            hidden_sizes: self.hidden_sizes.clone(),
            activations: self.activations.clone(),
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seed,
            init_scale: self.init_scale,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationConfig {
    pub count: usize,
    pub quality_ratio: f64,
    /// train | val | test
    pub gate_split: String,
    pub attempt_budget: usize,
    pub base_seed: u64,
    pub operators: Vec<ModelMutationSpec>,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig {
            count: 200,
            quality_ratio: 0.9,
            gate_split: "val".into(),
            attempt_budget: 2000,
            base_seed: 1000,
            operators: vec![
                ModelMutationSpec::new(ModelMutationKind::GaussianFuzz, 0.3, 1.5, 0),
                ModelMutationSpec::new(ModelMutationKind::WeightShuffle, 0.3, 1.0, 0),
                ModelMutationSpec::new(ModelMutationKind::NeuronSwitch, 0.1, 1.0, 0),
                ModelMutationSpec::new(ModelMutationKind::NeuronActivationInverse, 0.1, 1.0, 0),
            ],
        }
    }
}

impl MutationConfig {
    pub fn gate_split(&self) -> Result<Split, CliError> {
        self.gate_split
            .parse()
            .map_err(|_| CliError::config(format!("unknown gate split {:?}", self.gate_split)))
    }

    pub fn pool_config(&self) -> mutnet::mutation::PoolConfig {
        mutnet::mutation::PoolConfig {
            count: self.count,
            quality_ratio: self.quality_ratio,
            gate_split: self.gate_split().unwrap_or(Split::Val),
            attempt_budget: self.attempt_budget,
            base_seed: self.base_seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub quantile: f64,
    pub p1_multiplier: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub max_mutants: Option<usize>,
    pub epsilon_candidates: Vec<f64>,
    pub target_flip_rate: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            quantile: 0.95,
            p1_multiplier: 2.0,
            alpha: 0.05,
            beta: 0.05,
            max_mutants: None,
            epsilon_candidates: (1..=24).map(|i| i as f64 * 0.025).collect(),
            target_flip_rate: 0.7,
        }
    }
}

impl DetectionConfig {
    pub fn calibration_options(&self) -> mutnet::analysis::CalibrationOptions {
        mutnet::analysis::CalibrationOptions {
            quantile: self.quantile,
            p1_multiplier: self.p1_multiplier,
            alpha: self.alpha,
            beta: self.beta,
            max_mutants: self.max_mutants,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmtConfig {
    pub holdout_fraction: f64,
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for PmtConfig {
    fn default() -> Self {
        PmtConfig {
            holdout_fraction: 0.3,
            seed: 99,
            epochs: 500,
            learning_rate: 0.5,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceMutationConfig {
    #[serde(default)]
    pub program_ops: Vec<ProgramMutationSpec>,
    #[serde(default)]
    pub data_ops: Vec<DataMutationSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

/// Flag overrides applied after the file is parsed. Flags win.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Master seed: replaces dataset.seed with S, training.seed with S+1,
    /// mutation.base_seed with S+2, and pmt.seed with S+3.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<CampaignConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: CampaignConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))?;
        if config.schema_version != 1 {
            return Err(CliError::config(format!(
                "unsupported config schema_version {}",
                config.schema_version
            )));
        }
        if let Some(seed) = overrides.seed {
            config.dataset.seed = seed;
            config.training.seed = seed.wrapping_add(1);
            config.mutation.base_seed = seed.wrapping_add(2);
            config.pmt.seed = seed.wrapping_add(3);
        }
        if let Some(out) = &overrides.out {
            config.output.dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let kind = self.dataset.kind.as_str();
        if !matches!(kind, "blobs" | "two_moons" | "spirals" | "csv") {
            return Err(CliError::config(format!("unknown dataset kind {kind:?}")));
        }
        if kind == "csv" {
            if self.dataset.path.is_none() {
                return Err(CliError::config("csv dataset needs dataset.path"));
            }
            if self.dataset.label_column.is_none() {
                return Err(CliError::config("csv dataset needs dataset.label_column"));
            }
        }
        if !(0.0..1.0).contains(&self.pmt.holdout_fraction) || self.pmt.holdout_fraction == 0.0 {
            return Err(CliError::config(format!(
                "pmt.holdout_fraction must lie in (0, 1), got {}",
                self.pmt.holdout_fraction
            )));
        }
        self.mutation.gate_split().map(|_| ())?;
        Ok(())
    }

    /// Effective-config echo embedded in every artifact.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Builds or loads the dataset described by the config.
    pub fn build_dataset(&self) -> Result<mutnet::data::Dataset, CliError> {
        let d = &self.dataset;
        let data = match d.kind.as_str() {
            "csv" => mutnet::data::load_csv(
                d.path.as_ref().expect("validated"),
                d.label_column.as_ref().expect("validated"),
                d.fractions,
                d.seed,
            )
            .map_err(CliError::from)?,
            kind => {
                let synthetic_kind = match kind {
                    "blobs" => mutnet::data::SyntheticKind::Blobs,
                    "two_moons" => mutnet::data::SyntheticKind::TwoMoons,
                    _ => mutnet::data::SyntheticKind::Spirals,
                };
                mutnet::data::generate_synthetic(synthetic_kind, d.n, d.noise, d.seed)
                    .and_then(|ds| ds.with_splits(d.fractions, d.seed))
                    .map_err(CliError::from)?
            }
        };
        Ok(data)
    }
}
