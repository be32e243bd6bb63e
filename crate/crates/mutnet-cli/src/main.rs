//! `mutnet` command-line driver: reproducible mutation-testing campaigns.

mod artifacts;
mod commands;
mod config;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CampaignConfig, Overrides};
use exit::CliError;

#[derive(Parser)]
#[command(
    name = "mutnet",
    version,
    about = "Mutation testing for small feedforward classifiers",
    after_help = "Exit codes: 0 success, 2 configuration error, 3 data/input error, \
                  4 budget or convergence failure."
)]
struct Cli {
    /// Campaign configuration file (TOML)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed: overrides dataset.seed with S, training.seed with
    /// S+1, mutation.base_seed with S+2, pmt.seed with S+3
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,

    /// Output directory (overrides output.dir from the config)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for parallel sections (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Cross-check reported results against brute-force oracles
    #[arg(long, global = true)]
    verify: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the baseline classifier; writes dataset, model, and metrics
    Train,
    /// Apply one data mutation operator to a dataset archive
    MutateData {
        /// Dataset archive to mutate (default: <out>/dataset.json)
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// label_error | data_missing | data_repetition | noise_perturbation | data_shuffle
        #[arg(long)]
        kind: String,
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Seed for the operator's selection stream
        #[arg(long, default_value_t = 0)]
        mutation_seed: u64,
    },
    /// Retrain source-level mutants from the config's operator lists
    MutateSource {
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Generate the quality-gated model-level mutant pool
    #[command(alias = "mutate")]
    MutateModel {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Build the kill matrix and mutation score for a pool
    Score {
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// train | val | test
        #[arg(long, default_value = "test")]
        split: String,
    },
    /// Sequential LCR detection over a samples file
    Detect {
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// JSON file: {"samples": [[...], ...], "adversarial": [bool, ...]?}
        #[arg(long)]
        samples: PathBuf,
    },
    /// Predict killed/survived from static mutant features
    Pmt {
        #[arg(long)]
        pool: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Kill report from `score` (default: <out>/score_report.json)
        #[arg(long)]
        kill: Option<PathBuf>,
    },
    /// Summarize the artifacts present in the output directory
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // double initialization only matters inside tests; ignore it
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code.clamp(0, 255) as u8)
        }
    }
}

fn load_config(cli: &Cli) -> Result<CampaignConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config is required for this command"))?;
    CampaignConfig::load(
        path,
        &Overrides {
            seed: cli.seed,
            out: cli.out.clone(),
        },
    )
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Train => commands::train::run(&load_config(&cli)?),
        Command::MutateData {
            dataset,
            kind,
            rate,
            sigma,
            mutation_seed,
        } => commands::mutate_data::run(
            &load_config(&cli)?,
            dataset.as_deref(),
            kind,
            *rate,
            *sigma,
            *mutation_seed,
        ),
        Command::MutateSource { dataset } => {
            commands::mutate_source::run(&load_config(&cli)?, dataset.as_deref())
        }
        Command::MutateModel { model, dataset } => {
            commands::mutate_model::run(&load_config(&cli)?, model.as_deref(), dataset.as_deref())
        }
        Command::Score {
            pool,
            model,
            dataset,
            split,
        } => commands::score::run(
            &load_config(&cli)?,
            pool.as_deref(),
            model.as_deref(),
            dataset.as_deref(),
            split,
            cli.verify,
        ),
        Command::Detect {
            pool,
            model,
            dataset,
            samples,
        } => commands::detect::run(
            &load_config(&cli)?,
            pool.as_deref(),
            model.as_deref(),
            dataset.as_deref(),
            samples,
        ),
        Command::Pmt {
            pool,
            model,
            dataset,
            kill,
        } => commands::pmt::run(
            &load_config(&cli)?,
            pool.as_deref(),
            model.as_deref(),
            dataset.as_deref(),
            kill.as_deref(),
        ),
        Command::Report => commands::report::run(&load_config(&cli)?),
    }
}
