//! `mutnet score`

use std::path::Path;

use mutnet::analysis::{kill_matrix, mutation_score, KillMatrix};
use mutnet::data::{Dataset, Split};
use mutnet::mutation::{read_pool_archive, MutantRecord};
use mutnet::nn::Network;
use mutnet::Error;

use crate::artifacts::{write_json, OutputLock, ScoreReport};
use crate::commands::{default_path, load_dataset, load_network};
use crate::config::CampaignConfig;
use crate::exit::CliError;

pub fn run(
    config: &CampaignConfig,
    pool: Option<&Path>,
    model: Option<&Path>,
    dataset: Option<&Path>,
    split: &str,
    verify: bool,
) -> Result<(), CliError> {
    let split: Split = split
        .parse()
        .map_err(|_| CliError::config(format!("unknown split {split:?}")))?;
    let out = &config.output.dir;
    let _lock = OutputLock::acquire(out)?;

    let network = load_network(&default_path(model, config, "model.json"))?;
    let data = load_dataset(&default_path(dataset, config, "dataset.json"))?;
    let pool_dir = default_path(pool, config, "pool");
    let (records, _archive) = read_pool_archive(&pool_dir)?;

    let km = kill_matrix(&network, &records, &data, split)?;
    let verified = if verify {
        let oracle = brute_force(&network, &records, &data, split)?;
        if oracle != km {
            return Err(CliError::data(
                "kill matrix does not match the brute-force oracle",
            ));
        }
        Some(true)
    } else {
        None
    };

    let score = mutation_score(&km, false)?;
    let score_excl = match mutation_score(&km, true) {
        Ok(s) => Some(s),
        Err(Error::NoScorableMutants) => None,
        Err(e) => return Err(e.into()),
    };
    let killed_mutants = (0..km.mutant_count()).filter(|&m| km.row_killed(m)).count();

    let report = ScoreReport {
        schema_version: 1,
        config: config.echo(),
        split: split.to_string(),
        mutant_ids: km.mutant_ids.clone(),
        test_indices: km.test_indices.clone(),
        kill_rows_base64: (0..km.mutant_count())
            .map(|m| km.row_bitset_base64(m))
            .collect(),
        pseudo_equivalent: km.pseudo_equivalent.clone(),
        killed_mutants,
        mutation_score: score,
        mutation_score_excluding_pseudo_equivalent: score_excl,
        verified,
    };
    write_json(&out.join("score_report.json"), &report)?;

    println!(
        "mutation score {:.4} ({killed_mutants}/{} mutants killed on {} tests{})",
        score,
        km.mutant_count(),
        km.test_indices.len(),
        if verify { ", oracle-verified" } else { "" }
    );
    println!("wrote {}", out.join("score_report.json").display());
    Ok(())
}

/// Independent per-cell recomputation with fresh forward passes.
fn brute_force(
    original: &Network,
    pool: &[MutantRecord],
    data: &Dataset,
    split: Split,
) -> Result<KillMatrix, CliError> {
    let test_indices = data.split_indices(split);
    let mut killed = Vec::with_capacity(pool.len());
    for record in pool {
        let mut row = Vec::with_capacity(test_indices.len());
        for &t in &test_indices {
            let original_label = original.predict_label(data.feature(t))?;
            let correct = original_label == data.label(t);
            let mutant_label = record.network.predict_label(data.feature(t))?;
            row.push(correct && mutant_label != original_label);
        }
        killed.push(row);
    }
    let pseudo_equivalent = killed
        .iter()
        .map(|row: &Vec<bool>| !row.iter().any(|&k| k))
        .collect();
    Ok(KillMatrix {
        mutant_ids: pool.iter().map(|r| r.id).collect(),
        test_indices,
        killed,
        pseudo_equivalent,
    })
}
