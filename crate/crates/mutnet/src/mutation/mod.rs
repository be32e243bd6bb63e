//! Model-level and source-level mutation operators and pool generation.

mod model_ops;
mod pool;
mod program_ops;

pub use model_ops::{apply_model_operator, ModelMutationKind, ModelMutationSpec, MutationLevel};
pub use pool::{
    build_source_mutant, generate_pool, read_pool_archive, write_pool_archive, MutantOrigin,
    MutantRecord, OperatorDescriptor, OperatorStats, PoolArchive, PoolConfig, PoolStats,
    RejectedMutant, SourceMutation,
};
pub use program_ops::{apply_program_operator, ProgramMutationKind, ProgramMutationSpec};
