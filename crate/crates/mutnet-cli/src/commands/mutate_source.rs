//! `mutnet mutate-source`

use std::path::Path;

use mutnet::mutation::{build_source_mutant, write_pool_archive, PoolStats, SourceMutation};
use mutnet::nn::train;

use crate::artifacts::{write_json, OutputLock, SourcePoolReport};
use crate::commands::{default_path, load_dataset};
use crate::config::CampaignConfig;
use crate::exit::CliError;

pub fn run(config: &CampaignConfig, dataset: Option<&Path>) -> Result<(), CliError> {
    let ops: Vec<SourceMutation> = config
        .source_mutation
        .program_ops
        .iter()
        .cloned()
        .map(SourceMutation::Program)
        .chain(
            config
                .source_mutation
                .data_ops
                .iter()
                .cloned()
                .map(SourceMutation::Data),
        )
        .collect();
    if ops.is_empty() {
        return Err(CliError::config(
            "no source mutation operators configured under [source_mutation]",
        ));
    }

    let out = &config.output.dir;
    let _lock = OutputLock::acquire(out)?;
    let data = load_dataset(&default_path(dataset, config, "dataset.json"))?;
    let base_spec = config.training.to_spec();
    let gate_split = config.mutation.gate_split()?;

    // deterministic baseline for the quality gate
    let baseline = train(&base_spec, &data).map_err(CliError::from)?;
    let baseline_accuracy = baseline
        .accuracy(&data, gate_split)
        .map_err(CliError::from)?;

    let mut pool = Vec::with_capacity(ops.len());
    for (id, op) in ops.iter().enumerate() {
        let record = build_source_mutant(
            &base_spec,
            &data,
            op,
            gate_split,
            config.mutation.quality_ratio,
            baseline_accuracy,
            id,
        )?;
        println!(
            "source mutant {id} [{}]: accuracy {:.4} ({})",
            record.operator.name(),
            record.accuracy,
            if record.retained {
                "retained"
            } else {
                "rejected"
            }
        );
        pool.push(record);
    }

    let retained = pool.iter().filter(|r| r.retained).count();
    let stats = PoolStats {
        attempts: pool.len(),
        retained,
        original_accuracy: baseline_accuracy,
        threshold: config.mutation.quality_ratio * baseline_accuracy,
        ..PoolStats::default()
    };
    let pool_dir = out.join("source_pool");
    write_pool_archive(&pool_dir, &pool, &stats, config.echo())?;
    write_json(
        &out.join("source_pool_report.json"),
        &SourcePoolReport {
            schema_version: 1,
            config: config.echo(),
            baseline_accuracy,
            mutants: pool.len(),
            retained,
        },
    )?;
    println!("wrote {}", pool_dir.display());
    Ok(())
}
