//! Synthetic benchmark harness: noise, sparsity and compression sweeps.

mod config;
mod report;
mod run;

pub use config::{DictionarySource, ErrorNorm, Experiment, ExperimentConfig, MethodKind};
pub use report::{
    aggregate, compare_pruning, emit_csv, emit_summary, spearman, summary_path, summary_text, write_csv,
    PruningComparison, Replication, ResultRow, CSV_HEADER,
};
pub use run::{
    coefficient_error, load_dictionary, mean_std, reconstruction_error, run_compression_sweep,
    run_experiment, run_noise_sweep, run_sparsity_sweep,
};
