//! Repeated-trial comparison of feature selectors.
//!
//! Each trial resamples a stratified split with seed `seed + t`, fits the
//! normaliser on the training part, ranks features with every selector,
//! and for every retention percentage trains the evaluation classifier on
//! the selected columns and scores it on the test part. Trials run in
//! parallel but are aggregated in trial order, so reports do not depend on
//! the number of worker threads.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{confusion, metrics, ConfusionMatrix, MetricsReport};
use super::wilcoxon::{wilcoxon_signed_rank, WilcoxonResult};
use crate::baselines::{anova_f_scores, chi2_scores, knn_predict};
use crate::basis::SmoothnessParam;
use crate::dataset::{apply_normalizer, fit_normalizer, stratified_split, LabeledDataset};
use crate::fema::fema_train;
use crate::overlap::{rank_features, SamplingGrid};
use crate::ranking::{select_top, FeatureRanking, RankEntry};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    Femafs,
    Chi2,
    Anova,
    /// All features, whatever the retention percentage.
    None,
    /// Uniformly random feature order; a control.
    Random,
}

impl SelectorKind {
    pub fn name(self) -> &'static str {
        match self {
            SelectorKind::Femafs => "femafs",
            SelectorKind::Chi2 => "chi2",
            SelectorKind::Anova => "anova",
            SelectorKind::None => "none",
            SelectorKind::Random => "random",
        }
    }
}

impl std::str::FromStr for SelectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "femafs" => Ok(SelectorKind::Femafs),
            "chi2" => Ok(SelectorKind::Chi2),
            "anova" => Ok(SelectorKind::Anova),
            "none" => Ok(SelectorKind::None),
            "random" => Ok(SelectorKind::Random),
            other => Err(Error::InvalidParameter(format!("unknown selector '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    /// k-nearest neighbours with [`ExperimentConfig::neighbors`].
    Knn,
    Fema,
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knn" => Ok(ClassifierKind::Knn),
            "fema" => Ok(ClassifierKind::Fema),
            other => Err(Error::InvalidParameter(format!("unknown classifier '{other}'"))),
        }
    }
}

pub fn default_percents() -> Vec<f64> {
    (2..=12).map(|i| (i * 5) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: SmoothnessParam,
    pub grid_size: usize,
    pub percents: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub selectors: Vec<SelectorKind>,
    pub classifier: ClassifierKind,
    pub neighbors: usize,
    pub alpha: f64,
    pub test_fraction: f64,
    /// Class id (1-based) counted as positive for F1/TPR/FPR.
    pub positive_class: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: SmoothnessParam::default(),
            grid_size: crate::overlap::DEFAULT_GRID_SIZE,
            percents: default_percents(),
            trials: 25,
            seed: 0,
            selectors: vec![
                SelectorKind::Femafs,
                SelectorKind::Chi2,
                SelectorKind::Anova,
                SelectorKind::None,
            ],
            classifier: ClassifierKind::Knn,
            neighbors: 1,
            alpha: 0.05,
            test_fraction: 0.3,
            positive_class: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.percents.is_empty() {
            return Err(Error::InvalidParameter("no retention percentages".into()));
        }
        if let Some(p) = self.percents.iter().find(|p| !(**p > 0.0 && **p <= 100.0)) {
            return Err(Error::InvalidParameter(format!(
                "percent must lie in (0, 100], got {p}"
            )));
        }
        if self.selectors.is_empty() {
            return Err(Error::InvalidParameter("no selectors".into()));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
        }
        if self.neighbors == 0 {
            return Err(Error::InvalidParameter("neighbors must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Display names of the configured selectors; repeats get a `#n` suffix.
    pub fn method_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.selectors.len());
        for (i, s) in self.selectors.iter().enumerate() {
            let repeat = self.selectors[..i].iter().filter(|o| *o == s).count();
            names.push(if repeat == 0 {
                s.name().to_owned()
            } else {
                format!("{}#{}", s.name(), repeat + 1)
            });
        }
        names
    }
}

/// Ranks the features of a normalised training set with `selector`.
/// `seed` only matters for [`SelectorKind::Random`].
pub fn rank_with(
    selector: SelectorKind,
    train: &LabeledDataset,
    k: SmoothnessParam,
    grid: &SamplingGrid,
    seed: u64,
) -> Result<FeatureRanking> {
    let constant: Vec<bool> = (0..train.n_features()).map(|j| train.is_constant(j)).collect();
    match selector {
        SelectorKind::Femafs => rank_features(train, grid, k),
        SelectorKind::Chi2 => {
            let s = chi2_scores(train)?;
            Ok(FeatureRanking::from_scores(&s.scores, s.direction, &constant))
        }
        SelectorKind::Anova => {
            let s = anova_f_scores(train)?;
            Ok(FeatureRanking::from_scores(&s.scores, s.direction, &constant))
        }
        SelectorKind::None => Ok(FeatureRanking::identity(train.n_features())),
        SelectorKind::Random => {
            let mut order: Vec<usize> = (0..train.n_features()).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let mut ranking = FeatureRanking::identity(train.n_features());
            ranking.entries = order
                .into_iter()
                .enumerate()
                .map(|(pos, index)| RankEntry {
                    index,
                    score: pos as f64,
                    constant: false,
                })
                .collect();
            Ok(ranking)
        }
    }
}

/// Features kept by `selector` at `percent`.
pub fn selected_features(
    selector: SelectorKind,
    ranking: &FeatureRanking,
    percent: f64,
) -> Result<Vec<usize>> {
    match selector {
        SelectorKind::None => Ok((0..ranking.len()).collect()),
        _ => select_top(ranking, percent),
    }
}

/// Trains the classifier on `train` restricted to `subset`, predicts `test`
/// and scores the predictions. Both sets must already be normalised.
pub fn evaluate_subset(
    train: &LabeledDataset,
    test: &LabeledDataset,
    subset: &[usize],
    config: &ExperimentConfig,
) -> Result<(ConfusionMatrix, MetricsReport)> {
    // column order does not matter to either classifier; a canonical order
    // keeps distance sums bitwise stable across selectors
    let mut columns = subset.to_vec();
    columns.sort_unstable();
    let train = train.project(&columns)?;
    let test = test.project(&columns)?;
    let predicted: Vec<usize> = match config.classifier {
        ClassifierKind::Knn => (0..test.n_samples())
            .into_par_iter()
            .map(|i| knn_predict(&train, test.row(i), config.neighbors))
            .collect::<Result<_>>()?,
        ClassifierKind::Fema => fema_train(&train, config.k)?.predict_batch(&test)?,
    };
    let cm = confusion(
        &predicted,
        test.labels(),
        config.positive_class,
        test.class_count(),
    )?;
    Ok((cm, metrics(&cm)))
}

/// Seed of the random selector for a trial and method slot.
fn random_selector_seed(trial_seed: u64, method: usize) -> u64 {
    trial_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(method as u64 + 1)
}

/// `metrics[method][percent]` for one trial.
type TrialResult = Vec<Vec<MetricsReport>>;

fn run_trial(data: &LabeledDataset, config: &ExperimentConfig, trial: usize) -> Result<TrialResult> {
    let seed = config.seed.wrapping_add(trial as u64);
    let (train, test) = stratified_split(data, config.test_fraction, seed)?;
    let stats = fit_normalizer(&train);
    let train = apply_normalizer(&stats, &train)?;
    let test = apply_normalizer(&stats, &test)?;
    let grid = SamplingGrid::uniform(config.grid_size)?;
    config
        .selectors
        .iter()
        .enumerate()
        .map(|(m, &selector)| {
            let ranking = rank_with(selector, &train, config.k, &grid, random_selector_seed(seed, m))?;
            config
                .percents
                .iter()
                .map(|&percent| {
                    let subset = selected_features(selector, &ranking, percent)?;
                    Ok(evaluate_subset(&train, &test, &subset, config)?.1)
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std: f64,
    pub values: Vec<f64>,
}

impl Summary {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std, values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub method: String,
    pub selector: SelectorKind,
    pub percent: f64,
    pub features_kept: usize,
    pub f1: Summary,
    pub accuracy: Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    F1,
    Accuracy,
}

/// Wilcoxon test of one method against the reference at one percentage.
/// `decision` is from the method's point of view: `first_better` means the
/// method beat the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub method: String,
    pub percent: f64,
    pub metric: Metric,
    pub result: WilcoxonResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n_samples: usize,
    pub n_features: usize,
    pub class_count: usize,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub methods: Vec<String>,
    /// Method every other one is compared against (the first FEMa-FS entry).
    pub reference: Option<String>,
    pub cells: Vec<CellSummary>,
    pub comparisons: Vec<Comparison>,
}

impl ExperimentReport {
    pub fn cell(&self, method: &str, percent: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.percent == percent)
    }

    pub fn comparison(&self, method: &str, percent: f64, metric: Metric) -> Option<&Comparison> {
        self.comparisons
            .iter()
            .find(|c| c.method == method && c.percent == percent && c.metric == metric)
    }
}

pub fn run_experiment(data: &LabeledDataset, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    if config.positive_class == 0 || config.positive_class > data.class_count() {
        return Err(Error::LabelOutOfRange {
            label: config.positive_class,
            class_count: data.class_count(),
        });
    }
    let trials: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(data, config, t))
        .collect::<Result<_>>()?;

    let methods = config.method_names();
    let mut cells = Vec::with_capacity(methods.len() * config.percents.len());
    for (m, name) in methods.iter().enumerate() {
        let selector = config.selectors[m];
        for (p, &percent) in config.percents.iter().enumerate() {
            let f1 = trials.iter().map(|t| t[m][p].f1).collect();
            let accuracy = trials.iter().map(|t| t[m][p].accuracy).collect();
            let features_kept = match selector {
                SelectorKind::None => data.n_features(),
                _ => crate::ranking::retained_count(data.n_features(), percent)?,
            };
            cells.push(CellSummary {
                method: name.clone(),
                selector,
                percent,
                features_kept,
                f1: Summary::from_values(f1),
                accuracy: Summary::from_values(accuracy),
            });
        }
    }

    let reference = config
        .selectors
        .iter()
        .position(|&s| s == SelectorKind::Femafs);
    let mut comparisons = Vec::new();
    if let Some(r) = reference {
        for m in (0..methods.len()).filter(|&m| m != r) {
            for (p, &percent) in config.percents.iter().enumerate() {
                for metric in [Metric::F1, Metric::Accuracy] {
                    let pick = |idx: usize| -> Vec<f64> {
                        trials
                            .iter()
                            .map(|t| match metric {
                                Metric::F1 => t[idx][p].f1,
                                Metric::Accuracy => t[idx][p].accuracy,
                            })
                            .collect()
                    };
                    let result = wilcoxon_signed_rank(&pick(m), &pick(r), config.alpha)?;
                    comparisons.push(Comparison {
                        method: methods[m].clone(),
                        percent,
                        metric,
                        result,
                    });
                }
            }
        }
    }

    Ok(ExperimentReport {
        config: config.clone(),
        dataset: DatasetSummary {
            n_samples: data.n_samples(),
            n_features: data.n_features(),
            class_count: data.class_count(),
            feature_names: data.feature_names().to_vec(),
        },
        reference: reference.map(|r| methods[r].clone()),
        methods,
        cells,
        comparisons,
    })
}
