pub mod detect;
pub mod mutate_data;
pub mod mutate_model;
pub mod mutate_source;
pub mod pmt;
pub mod report;
pub mod score;
pub mod train;

use std::path::{Path, PathBuf};

use mutnet::data::Dataset;
use mutnet::nn::Network;

use crate::config::CampaignConfig;
use crate::exit::CliError;

/// Flag value if given, else the conventional path under the out dir.
pub fn default_path(flag: Option<&Path>, config: &CampaignConfig, name: &str) -> PathBuf {
    flag.map(Path::to_path_buf)
        .unwrap_or_else(|| config.output.dir.join(name))
}

pub fn load_network(path: &Path) -> Result<Network, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read model {}: {e}", path.display())))?;
    Network::from_json(&text)
        .map_err(|e| CliError::data(format!("invalid model {}: {e}", path.display())))
}

pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read dataset {}: {e}", path.display())))?;
    Dataset::from_json(&text)
        .map_err(|e| CliError::data(format!("invalid dataset {}: {e}", path.display())))
}
