//! CSV ingestion with dense label re-indexing and seeded splitting.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::dataset::Dataset;
use crate::error::{Error, Result};

/// Loads an RFC-4180 CSV with a header row into a [`Dataset`].
///
/// The named label column becomes the class (labels re-indexed densely by
/// sorted order of their distinct string values); every other column is
/// parsed as a real-valued feature. Split tags are assigned with the
/// seeded largest-remainder scheme of [`Dataset::with_splits`].
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    fractions: [f64; 3],
    seed: u64,
) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())
        .map_err(csv_error)?;

    let headers = reader.headers().map_err(csv_error)?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::LabelColumnNotFound(label_column.to_string()))?;
    let feature_names: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(i, h)| (i, h.to_string()))
        .collect();
    if feature_names.is_empty() {
        return Err(Error::InvalidSpec(
            "csv needs at least one feature column besides the label".into(),
        ));
    }

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (row_number, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let mut row = Vec::with_capacity(feature_names.len());
        for (col, name) in &feature_names {
            let cell = record.get(*col).unwrap_or("");
            let value: f64 = cell.trim().parse().map_err(|_| Error::CsvParse {
                row: row_number + 2, // 1-based, counting the header line
                column: name.clone(),
                message: format!("cannot parse {cell:?} as a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvParse {
                    row: row_number + 2,
                    column: name.clone(),
                    message: "non-finite feature value".into(),
                });
            }
            row.push(value);
        }
        let label = record.get(label_idx).unwrap_or("").trim().to_string();
        features.push(row);
        raw_labels.push(label);
    }
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }

    // dense re-index by sorted distinct label value
    let distinct: BTreeSet<&String> = raw_labels.iter().collect();
    let dense: BTreeMap<&String, usize> = distinct.into_iter().zip(0..).collect();
    let labels: Vec<usize> = raw_labels.iter().map(|l| dense[l]).collect();
    let class_count = dense.len().max(2);

    let provenance = format!(
        "csv:{} label={label_column}",
        path.as_ref().to_string_lossy()
    );
    let tags = vec![super::Split::Train; features.len()];
    Dataset::new(features, labels, tags, class_count, provenance)?.with_splits(fractions, seed)
}

fn csv_error(err: csv::Error) -> Error {
    match err.kind() {
        csv::ErrorKind::Io(_) => {
            if let csv::ErrorKind::Io(io) = err.into_kind() {
                Error::Io(io)
            } else {
                unreachable!()
            }
        }
        _ => Error::CsvParse {
            row: err
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or_default(),
            column: String::new(),
            message: err.to_string(),
        },
    }
}
