//! Kill matrices, mutation score, LCR measurement, sequential detection,
//! and adversarial-sample generation for evaluation.

mod fgsm;
mod kill;
mod lcr;
mod metrics;
mod sprt;

pub use fgsm::{fgsm, minimal_flip_samples, tune_epsilon, EpsilonSweep, FgsmOutcome};
pub use kill::{kill_matrix, mutation_score, KillMatrix};
pub use lcr::{batch_lcr, lcr};
pub use metrics::auroc;
pub use sprt::{calibrate, detect, CalibrationOptions, LcrReport, SprtConfig, Verdict};
