//! Seeded multi-run experiments and their statistical comparison.

mod experiment;
pub mod stats;
mod summary;

pub use experiment::{
    read_csv_column, read_records_csv, records_to_csv, run_experiment, run_experiment_jobs, run_once,
    strip_wall_clock, write_records_csv, ExperimentConfig, InstanceSource, Method, RunRecord, DEFAULT_RUNS,
    DEFAULT_TIMEOUT_SECS, WALL_CLOCK_COLUMNS,
};
pub use stats::{mann_whitney_u, vargha_delaney_a, MannWhitney};
pub use summary::{compare, summarize, ComparisonResult, MethodSummary, Metric, PairComparison, Summary, SIGNIFICANCE};
