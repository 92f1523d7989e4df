//! Finite Element Machines (FEMa) and overlap-based feature selection.
//!
//! The crate is organised bottom-up:
//!
//! - [`dataset`]: CSV ingestion, min-max normalisation, stratified splits
//! - [`basis`]: Shepard inverse-distance basis functions
//! - [`fema`]: the lazy probabilistic classifier built on the basis
//! - [`overlap`]: per-feature probability curves, class-overlap scores, ranking
//! - [`baselines`]: chi-square and ANOVA-F filter scores, k-NN evaluation classifier
//! - [`evalstat`]: metrics, Wilcoxon signed-rank test, repeated-trial experiments
//! - [`cli`]: the `femafs` command-line front end

pub mod baselines;
pub mod basis;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod evalstat;
pub mod fema;
pub mod overlap;
pub mod ranking;

pub use error::{Error, Result};
