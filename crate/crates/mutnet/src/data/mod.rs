//! Datasets: generation, CSV ingestion, splitting, and source-level data
//! mutation operators.

mod csv_load;
mod dataset;
mod mutate;
mod synthetic;

pub use csv_load::load_csv;
pub use dataset::{largest_remainder_sizes, Dataset, FeatureBounds, Split};
pub use mutate::{mutate_data, DataMutationKind, DataMutationSpec};
pub use synthetic::{generate_synthetic, SyntheticKind};
