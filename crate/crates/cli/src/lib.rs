//! Dataset handling and the sampling experiment behind the `propfair` binary.

pub mod dataset;
pub mod experiment;

pub use dataset::{load_csv, read_csv, weighted_sample, weighted_sample_indices, Dataset};
pub use experiment::{
    emit_results, qualitative_check, read_results, run_experiment, write_results, Algorithm, AuditMode,
    ExperimentConfig, QualitativeReport, ResultRow, Trial, RESULTS_HEADER,
};

/// The bundled synthetic census-style dataset.
pub const BUNDLED_DATASET: &str = include_str!("../data/census_synthetic.csv");
/// Its sampling weight column.
pub const BUNDLED_WEIGHT: &str = "fnlwgt";
