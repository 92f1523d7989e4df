//! Comparison selectors and the evaluation classifier.
//!
//! `chi2_scores` uses the value-sum contingency construction: the observed
//! count for (class, feature) is the sum of that feature over the class's
//! samples and the expected count is the class prior times the feature's
//! column total. `anova_f_scores` is the one-way ANOVA F statistic.

use crate::basis::euclidean;
use crate::dataset::LabeledDataset;
use crate::ranking::{Direction, ScoreVector};
use crate::{Error, Result};

/// Reported F for features with zero within-class variance.
pub const ANOVA_SENTINEL: f64 = f64::MAX;

pub fn chi2_scores(train: &LabeledDataset) -> Result<ScoreVector> {
    let n = train.n_features();
    let c = train.class_count();
    let m = train.n_samples() as f64;
    let mut observed = vec![0.0; c * n];
    let mut totals = vec![0.0; n];
    for (i, row) in train.rows().enumerate() {
        let class = train.labels()[i] - 1;
        for (j, &v) in row.iter().enumerate() {
            if v < 0.0 {
                return Err(Error::NegativeValue {
                    row: i,
                    feature: j,
                    value: v,
                });
            }
            observed[class * n + j] += v;
            totals[j] += v;
        }
    }
    let priors: Vec<f64> = train.class_sizes().iter().map(|&s| s as f64 / m).collect();
    let mut scores = vec![0.0; n];
    let mut degenerate = vec![false; n];
    for j in 0..n {
        if totals[j] == 0.0 {
            degenerate[j] = true;
            continue;
        }
        scores[j] = (0..c)
            .map(|i| {
                let expected = priors[i] * totals[j];
                let diff = observed[i * n + j] - expected;
                diff * diff / expected
            })
            .sum();
    }
    Ok(ScoreVector {
        scores,
        direction: Direction::HigherIsBetter,
        degenerate,
    })
}

/// One-way ANOVA F per feature with `c - 1` and `m - c` degrees of freedom.
///
/// Features with zero within-class variance but distinct class means get
/// [`ANOVA_SENTINEL`]; constant features get 0. Both are flagged degenerate.
pub fn anova_f_scores(train: &LabeledDataset) -> Result<ScoreVector> {
    let n = train.n_features();
    let c = train.class_count();
    let m = train.n_samples();
    let sizes = train.class_sizes();
    if let Some((i, &s)) = sizes.iter().enumerate().find(|(_, &s)| s < 2) {
        return Err(Error::ClassTooSmall {
            class: i + 1,
            count: s,
            required: 2,
        });
    }
    if m <= c {
        return Err(Error::InvalidParameter(format!(
            "ANOVA needs more samples ({m}) than classes ({c})"
        )));
    }
    let mut class_sums = vec![0.0; c * n];
    let mut grand = vec![0.0; n];
    for (i, row) in train.rows().enumerate() {
        let class = train.labels()[i] - 1;
        for (j, &v) in row.iter().enumerate() {
            class_sums[class * n + j] += v;
            grand[j] += v;
        }
    }
    let class_means: Vec<f64> = class_sums
        .iter()
        .enumerate()
        .map(|(idx, s)| s / sizes[idx / n] as f64)
        .collect();
    let grand_means: Vec<f64> = grand.iter().map(|s| s / m as f64).collect();

    let mut within = vec![0.0; n];
    for (i, row) in train.rows().enumerate() {
        let class = train.labels()[i] - 1;
        for (j, &v) in row.iter().enumerate() {
            let d = v - class_means[class * n + j];
            within[j] += d * d;
        }
    }
    let df_between = (c - 1) as f64;
    let df_within = (m - c) as f64;
    let mut scores = vec![0.0; n];
    let mut degenerate = vec![false; n];
    for j in 0..n {
        let between: f64 = (0..c)
            .map(|i| {
                let d = class_means[i * n + j] - grand_means[j];
                sizes[i] as f64 * d * d
            })
            .sum();
        if within[j] == 0.0 {
            degenerate[j] = true;
            scores[j] = if between > 0.0 { ANOVA_SENTINEL } else { 0.0 };
        } else {
            scores[j] = (between / df_between) / (within[j] / df_within);
        }
    }
    Ok(ScoreVector {
        scores,
        direction: Direction::HigherIsBetter,
        degenerate,
    })
}

/// Majority label among the `neighbors` nearest training samples.
///
/// Distance ties go to the lower sample index, vote ties to the lower class.
pub fn knn_predict(train: &LabeledDataset, query: &[f64], neighbors: usize) -> Result<usize> {
    if neighbors == 0 || neighbors > train.n_samples() {
        return Err(Error::InvalidParameter(format!(
            "neighbors must lie in 1..={}, got {neighbors}",
            train.n_samples()
        )));
    }
    if query.len() != train.n_features() {
        return Err(Error::DimensionMismatch {
            expected: train.n_features(),
            found: query.len(),
        });
    }
    let labels = train.labels();
    if neighbors == 1 {
        let mut best = (f64::INFINITY, 0usize);
        for (i, row) in train.rows().enumerate() {
            let d = euclidean(query, row);
            if d < best.0 {
                best = (d, i);
            }
        }
        return Ok(labels[best.1]);
    }
    let mut order: Vec<(f64, usize)> = train
        .rows()
        .enumerate()
        .map(|(i, row)| (euclidean(query, row), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; train.class_count()];
    for &(_, i) in &order[..neighbors] {
        votes[labels[i] - 1] += 1;
    }
    let mut winner = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[winner] {
            winner = c;
        }
    }
    Ok(winner + 1)
}
