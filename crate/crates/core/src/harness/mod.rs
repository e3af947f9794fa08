//! Graph generation, dataset cleaning, metrics and the experiment runner
//! behind the `linkclass` command-line tool.

pub mod clean;
pub mod experiment;
pub mod generator;
pub mod metrics;

pub use clean::{clean_directed_snapshot, CleanReport, CleanedGraph};
pub use experiment::{
    run_experiment, run_trial, run_trials, write_outputs, Algorithm, ExperimentConfig,
    ExperimentInput, ExperimentOutcome, InputSpec, Summary, TrialResult,
};
pub use generator::{generate_planted_graph, GeneratorSpec, PlantedGraph};
pub use metrics::{f_measure, stats, GraphStats, PositiveClass};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "LINKCLASS_OUTPUT_DIR";
