//! `mutnet train`

use serde::Serialize;

use mutnet::data::Split;
use mutnet::nn::{train, Network};

use crate::artifacts::{write_json, MetricsReport, OutputLock};
use crate::config::CampaignConfig;
use crate::exit::CliError;

/// Model file: the loadable network schema plus the campaign echo.
#[derive(Serialize)]
struct ModelFile<'a> {
    schema_version: u32,
    config: &'a serde_json::Value,
    #[serde(flatten)]
    network: &'a Network,
}

#[derive(Serialize)]
struct DatasetFile<'a> {
    schema_version: u32,
    config: &'a serde_json::Value,
    #[serde(flatten)]
    dataset: &'a mutnet::data::Dataset,
}

pub fn run(config: &CampaignConfig) -> Result<(), CliError> {
    let out = &config.output.dir;
    let _lock = OutputLock::acquire(out)?;
    let echo = config.echo();

    let data = config.build_dataset()?;
    let network = train(&config.training.to_spec(), &data).map_err(CliError::from)?;

    write_json(
        &out.join("dataset.json"),
        &DatasetFile {
            schema_version: 1,
            config: &echo,
            dataset: &data,
        },
    )?;
    write_json(
        &out.join("model.json"),
        &ModelFile {
            schema_version: 1,
            config: &echo,
            network: &network,
        },
    )?;

    let metrics = MetricsReport {
        schema_version: 1,
        config: echo,
        train_accuracy: network
            .accuracy(&data, Split::Train)
            .map_err(CliError::from)?,
        val_accuracy: network
            .accuracy(&data, Split::Val)
            .map_err(CliError::from)?,
        test_accuracy: network
            .accuracy(&data, Split::Test)
            .map_err(CliError::from)?,
    };
    write_json(&out.join("metrics.json"), &metrics)?;

    println!(
        "trained: accuracy train {:.4} / val {:.4} / test {:.4}",
        metrics.train_accuracy, metrics.val_accuracy, metrics.test_accuracy
    );
    println!("wrote {}", out.join("model.json").display());
    Ok(())
}
