//! Quality-gated mutant pool generation and the on-disk pool archive.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model_ops::{apply_model_operator, ModelMutationSpec};
use super::program_ops::{apply_program_operator, ProgramMutationSpec};
use crate::data::{mutate_data, DataMutationSpec, Dataset, Split};
use crate::error::{Error, PartialPool, Result};
use crate::nn::{train, Network, TrainingSpec};

/// How a mutant came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutantOrigin {
    ModelLevel,
    SourceLevelData,
    SourceLevelProgram,
}

/// The operator that produced a mutant, kept for provenance and features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OperatorDescriptor {
    Model(ModelMutationSpec),
    Data(DataMutationSpec),
    Program(ProgramMutationSpec),
}

impl OperatorDescriptor {
    /// Short operator name for stats keys and reports.
    pub fn name(&self) -> String {
        match self {
            OperatorDescriptor::Model(spec) => spec.kind.abbreviation().to_string(),
            OperatorDescriptor::Data(spec) => format!("{:?}", spec.kind),
            OperatorDescriptor::Program(spec) => format!("{:?}", spec.kind)
                .split([' ', '{'])
                .next()
                .unwrap_or("program")
                .to_string(),
        }
    }
}

/// One gated mutant: the mutated network plus provenance and gate outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub id: usize,
    pub origin: MutantOrigin,
    pub operator: OperatorDescriptor,
    pub network: Network,
    /// Accuracy on the gate split.
    pub accuracy: f64,
    pub retained: bool,
}

/// Per-operator attempt accounting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OperatorStats {
    pub attempts: usize,
    pub retained: usize,
    pub rejected: usize,
}

impl OperatorStats {
    pub fn rejection_rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.rejected as f64 / self.attempts as f64
        }
    }
}

/// A candidate that failed the quality gate; kept because rejection rates
/// are a report output in their own right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedMutant {
    pub id: usize,
    pub operator: String,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PoolStats {
    pub attempts: usize,
    pub retained: usize,
    pub original_accuracy: f64,
    pub threshold: f64,
    pub per_operator: BTreeMap<String, OperatorStats>,
    pub rejections: Vec<RejectedMutant>,
}

/// Pool-level generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    /// Number of retained mutants to produce.
    pub count: usize,
    /// Quality-gate ratio rho in (0, 1]: retain when
    /// `accuracy >= rho * original_accuracy` on the gate split.
    pub quality_ratio: f64,
    pub gate_split: Split,
    /// Upper bound on candidate generation before giving up.
    pub attempt_budget: usize,
    /// Candidate i mutates with seed `base_seed + i`.
    pub base_seed: u64,
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidSpec("pool count must be at least 1".into()));
        }
        if !(self.quality_ratio.is_finite()
            && self.quality_ratio > 0.0
            && self.quality_ratio <= 1.0)
        {
            return Err(Error::InvalidSpec(format!(
                "quality ratio must lie in (0, 1], got {}",
                self.quality_ratio
            )));
        }
        if self.attempt_budget < self.count {
            return Err(Error::InvalidSpec(
                "attempt budget cannot be smaller than the requested count".into(),
            ));
        }
        Ok(())
    }
}

/// Generates a quality-gated pool of model-level mutants.
///
/// Candidates cycle through `op_mix`; candidate `i` runs with seed
/// `base_seed + i`, so the pool is a pure function of its inputs. The
/// returned pool holds exactly `cfg.count` retained mutants, ordered by
/// candidate index; failing that within the budget is an error carrying
/// the partial pool.
pub fn generate_pool(
    network: &Network,
    data: &Dataset,
    op_mix: &[ModelMutationSpec],
    cfg: &PoolConfig,
) -> Result<(Vec<MutantRecord>, PoolStats)> {
    cfg.validate()?;
    if op_mix.is_empty() {
        return Err(Error::InvalidSpec("operator mix is empty".into()));
    }
    for spec in op_mix {
        spec.validate()?;
    }
    let original_accuracy = network.accuracy(data, cfg.gate_split)?;
    if original_accuracy <= 0.0 {
        return Err(Error::InvalidSpec(
            "original accuracy on the gate split must be positive".into(),
        ));
    }
    let threshold = cfg.quality_ratio * original_accuracy;

    let mut pool = Vec::with_capacity(cfg.count);
    let mut stats = PoolStats {
        original_accuracy,
        threshold,
        ..PoolStats::default()
    };
    for template in op_mix {
        stats
            .per_operator
            .entry(template.kind.abbreviation().to_string())
            .or_default();
    }

    let mut attempt = 0usize;
    while pool.len() < cfg.count && attempt < cfg.attempt_budget {
        let template = &op_mix[attempt % op_mix.len()];
        let spec = template.with_seed(cfg.base_seed.wrapping_add(attempt as u64));
        let mutant = apply_model_operator(network, &spec)?;
        let accuracy = mutant.accuracy(data, cfg.gate_split)?;
        let retained = accuracy >= threshold;

        let op_stats = stats
            .per_operator
            .get_mut(spec.kind.abbreviation())
            .expect("seeded above");
        op_stats.attempts += 1;
        stats.attempts += 1;
        if retained {
            op_stats.retained += 1;
            stats.retained += 1;
            pool.push(MutantRecord {
                id: attempt,
                origin: MutantOrigin::ModelLevel,
                operator: OperatorDescriptor::Model(spec),
                network: mutant,
                accuracy,
                retained: true,
            });
        } else {
            op_stats.rejected += 1;
            stats.rejections.push(RejectedMutant {
                id: attempt,
                operator: spec.kind.abbreviation().to_string(),
                accuracy,
            });
        }
        attempt += 1;
    }

    if pool.len() < cfg.count {
        return Err(Error::BudgetExhausted {
            partial: Box::new(PartialPool {
                requested: cfg.count,
                attempts: attempt,
                pool,
                stats,
            }),
        });
    }
    Ok((pool, stats))
}

/// Trains one source-level mutant from a mutated training configuration.
///
/// Program mutations rewrite the training spec; data mutations corrupt
/// the train split. Either way the mutant is trained from scratch and
/// gated against `quality_ratio * baseline_accuracy` on `gate_split`.
pub fn build_source_mutant(
    base_spec: &TrainingSpec,
    data: &Dataset,
    mutation: &SourceMutation,
    gate_split: Split,
    quality_ratio: f64,
    baseline_accuracy: f64,
    id: usize,
) -> Result<MutantRecord> {
    if !(quality_ratio.is_finite() && quality_ratio > 0.0 && quality_ratio <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "quality ratio must lie in (0, 1], got {quality_ratio}"
        )));
    }
    let (network, origin, operator) = match mutation {
        SourceMutation::Program(pspec) => {
            let mutated_spec = apply_program_operator(base_spec, pspec)?;
            let net = train(&mutated_spec, data)?;
            (
                net,
                MutantOrigin::SourceLevelProgram,
                OperatorDescriptor::Program(pspec.clone()),
            )
        }
        SourceMutation::Data(dspec) => {
            let mutated_data = mutate_data(data, dspec)?;
            let net = train(base_spec, &mutated_data)?;
            (
                net,
                MutantOrigin::SourceLevelData,
                OperatorDescriptor::Data(dspec.clone()),
            )
        }
    };
    // gate evaluation always runs on the clean dataset
    let accuracy = network.accuracy(data, gate_split)?;
    Ok(MutantRecord {
        id,
        origin,
        operator,
        network,
        accuracy,
        retained: accuracy >= quality_ratio * baseline_accuracy,
    })
}

/// A source-level mutation: either the program or the data route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum SourceMutation {
    Program(ProgramMutationSpec),
    Data(DataMutationSpec),
}

/// pool.json contents; mutant networks live in sibling files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolArchive {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub stats: PoolStats,
    pub records: Vec<PoolArchiveRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolArchiveRecord {
    pub id: usize,
    pub origin: MutantOrigin,
    pub operator: OperatorDescriptor,
    pub accuracy: f64,
    pub retained: bool,
    pub model_file: String,
}

/// Writes `pool.json` plus one `mutant_<id>.json` model file per mutant.
pub fn write_pool_archive(
    dir: impl AsRef<Path>,
    pool: &[MutantRecord],
    stats: &PoolStats,
    config_echo: serde_json::Value,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut records = Vec::with_capacity(pool.len());
    for record in pool {
        let model_file = format!("mutant_{}.json", record.id);
        fs::write(dir.join(&model_file), record.network.to_json())?;
        records.push(PoolArchiveRecord {
            id: record.id,
            origin: record.origin,
            operator: record.operator.clone(),
            accuracy: record.accuracy,
            retained: record.retained,
            model_file,
        });
    }
    let archive = PoolArchive {
        schema_version: 1,
        config: config_echo,
        stats: stats.clone(),
        records,
    };
    let mut body = serde_json::to_string_pretty(&archive)?;
    body.push('\n');
    fs::write(dir.join("pool.json"), body)?;
    Ok(())
}

/// Reads a pool archive back into memory.
pub fn read_pool_archive(dir: impl AsRef<Path>) -> Result<(Vec<MutantRecord>, PoolArchive)> {
    let dir = dir.as_ref();
    let archive: PoolArchive = serde_json::from_str(&fs::read_to_string(dir.join("pool.json"))?)?;
    let mut pool = Vec::with_capacity(archive.records.len());
    for record in &archive.records {
        let network = Network::from_json(&fs::read_to_string(dir.join(&record.model_file))?)?;
        pool.push(MutantRecord {
            id: record.id,
            origin: record.origin,
            operator: record.operator.clone(),
            network,
            accuracy: record.accuracy,
            retained: record.retained,
        });
    }
    Ok((pool, archive))
}
