//! `mutnet mutate-model` (alias `mutate`)

use std::path::Path;

use mutnet::mutation::{generate_pool, write_pool_archive};

use crate::artifacts::OutputLock;
use crate::commands::{default_path, load_dataset, load_network};
use crate::config::CampaignConfig;
use crate::exit::CliError;

pub fn run(
    config: &CampaignConfig,
    model: Option<&Path>,
    dataset: Option<&Path>,
) -> Result<(), CliError> {
    let out = &config.output.dir;
    let _lock = OutputLock::acquire(out)?;

    let network = load_network(&default_path(model, config, "model.json"))?;
    let data = load_dataset(&default_path(dataset, config, "dataset.json"))?;
    let pool_cfg = config.mutation.pool_config();

    let (pool, stats) = generate_pool(&network, &data, &config.mutation.operators, &pool_cfg)?;
    let pool_dir = out.join("pool");
    write_pool_archive(&pool_dir, &pool, &stats, config.echo())?;

    println!(
        "pool: {} retained in {} attempts (original accuracy {:.4}, threshold {:.4})",
        stats.retained, stats.attempts, stats.original_accuracy, stats.threshold
    );
    for (op, s) in &stats.per_operator {
        println!(
            "  {op}: {} attempts, {} retained, {} rejected (rejection rate {:.2})",
            s.attempts,
            s.retained,
            s.rejected,
            s.rejection_rate()
        );
    }
    println!("wrote {}", pool_dir.display());
    Ok(())
}
