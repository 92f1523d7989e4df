//! Evaluation: confusion matrices and metrics, the Wilcoxon signed-rank
//! test, and the repeated-trial experiment runner with its report formats.

pub mod experiment;
pub mod metrics;
pub mod report;
pub mod wilcoxon;

pub use experiment::{
    run_experiment, ClassifierKind, ExperimentConfig, ExperimentReport, SelectorKind,
};
pub use metrics::{confusion, metrics, ConfusionMatrix, MetricsReport};
pub use wilcoxon::{wilcoxon_signed_rank, Decision, WilcoxonResult};
