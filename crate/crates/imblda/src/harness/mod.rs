//! Experiment front-end: config ingestion, CSV dataset loading, model
//! persistence, and seeded parallel experiment execution.

pub mod config;
pub mod csvio;
pub mod experiment;
pub mod model_io;

pub use config::{
    load_config, DataSource, ExperimentConfig, ExperimentKind, MethodConfig, Tuning,
};
pub use csvio::{load_csv_dataset, load_csv_features, write_csv_dataset};
pub use experiment::{
    fit_method, run_experiment, BiasReport, FitOutput, IgnoranceRow, MethodSummaryRow, RunOutcome,
    RunRecord, SweepRow,
};
pub use model_io::{load_model, save_model, SavedModel};
