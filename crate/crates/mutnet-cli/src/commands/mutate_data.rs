//! `mutnet mutate-data`

use std::path::Path;

use serde::Serialize;

use mutnet::data::{mutate_data, DataMutationKind, DataMutationSpec};

use crate::artifacts::{write_json, DataMutationReport, OutputLock};
use crate::commands::{default_path, load_dataset};
use crate::config::CampaignConfig;
use crate::exit::CliError;

fn parse_kind(kind: &str) -> Result<DataMutationKind, CliError> {
    match kind {
        "label_error" => Ok(DataMutationKind::LabelError),
        "data_missing" => Ok(DataMutationKind::DataMissing),
        "data_repetition" => Ok(DataMutationKind::DataRepetition),
        "noise_perturbation" => Ok(DataMutationKind::NoisePerturbation),
        "data_shuffle" => Ok(DataMutationKind::DataShuffle),
        other => Err(CliError::config(format!(
            "unknown data mutation kind {other:?}"
        ))),
    }
}

#[derive(Serialize)]
struct MutatedDatasetFile<'a> {
    schema_version: u32,
    config: &'a serde_json::Value,
    #[serde(flatten)]
    dataset: &'a mutnet::data::Dataset,
}

pub fn run(
    config: &CampaignConfig,
    dataset: Option<&Path>,
    kind: &str,
    rate: f64,
    sigma: f64,
    mutation_seed: u64,
) -> Result<(), CliError> {
    let out = &config.output.dir;
    let _lock = OutputLock::acquire(out)?;

    let spec = DataMutationSpec {
        kind: parse_kind(kind)?,
        rate,
        sigma,
        seed: mutation_seed,
    };
    spec.validate()
        .map_err(|e| CliError::config(e.to_string()))?;

    let data = load_dataset(&default_path(dataset, config, "dataset.json"))?;
    let mutated = mutate_data(&data, &spec)?;

    let echo = config.echo();
    let output_dataset = "mutated_dataset.json";
    write_json(
        &out.join(output_dataset),
        &MutatedDatasetFile {
            schema_version: 1,
            config: &echo,
            dataset: &mutated,
        },
    )?;
    write_json(
        &out.join("data_mutation_report.json"),
        &DataMutationReport {
            schema_version: 1,
            config: echo,
            operator: spec,
            rows_before: data.len(),
            rows_after: mutated.len(),
            output_dataset: output_dataset.into(),
        },
    )?;
    println!("wrote {}", out.join(output_dataset).display());
    Ok(())
}
