//! Experiment harness: configuration, presets, repeated paired trials and
//! result emission.
//!
//! Every trial draws one data set and evaluates all estimators on it, so
//! comparisons between estimators are paired.

mod config;
pub mod emit;
mod presets;
mod run;

pub use config::{EmitFormat, ExperimentConfig, Folds, OutputSpec, Variant};
pub use presets::{preset, DEFAULT_SEED, PRESET_NAMES, PRESET_SUMMARIES};
pub use run::{
    alpha_estimator_name, estimator_names, run_experiment, stream_id, ExperimentResult,
    PairedDiff, ResultRow,
};
