//! Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped, tied absolute differences share their
//! average rank. The two-sided p-value is exact (subset-sum enumeration over
//! doubled ranks, so averaged ties stay integral) for up to
//! [`EXACT_MAX_N`] non-zero differences and uses the tie-corrected normal
//! approximation with continuity correction beyond that.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

pub const EXACT_MAX_N: usize = 25;
/// Pairs required before a decision is reported.
pub const MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Similar,
    /// The first sample is significantly larger.
    FirstBetter,
    SecondBetter,
    /// Too few pairs or non-zero differences for a decision.
    Inconclusive,
}

impl Decision {
    /// Three-way table symbol from the first sample's point of view.
    pub fn symbol(self) -> &'static str {
        match self {
            Decision::Similar => "=",
            Decision::FirstBetter => "↑",
            Decision::SecondBetter => "↓",
            Decision::Inconclusive => "n/a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub n_nonzero: usize,
    pub p_value: f64,
    pub decision: Decision,
    pub alpha: f64,
}

/// Average ranks (1-based) of `values`, ties sharing the mean rank.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Exact two-sided p-value for the smaller signed-rank sum `statistic`
/// given the ranks of the non-zero differences.
fn exact_p(ranks: &[f64], statistic: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let limit = (statistic * 2.0).round() as usize;
    let tail: u64 = counts[..=limit.min(total)].iter().sum();
    let p = 2.0 * tail as f64 / (1u64 << ranks.len()) as f64;
    p.min(1.0)
}

fn normal_p(ranks: &[f64], abs_diffs: &[f64], statistic: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = abs_diffs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((statistic - mean + 0.5) / var.sqrt()).min(0.0);
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * normal.cdf(z)).min(1.0)
}

/// Paired two-sided test of `a` against `b` at significance `alpha`.
///
/// Fewer than [`MIN_PAIRS`] pairs, or fewer than [`MIN_PAIRS`] non-zero
/// differences, yields [`Decision::Inconclusive`]. Enough pairs that are all
/// identical yields [`Decision::Similar`] with `p = 1`. Otherwise a
/// significant result is attributed to the side with the larger rank sum.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite sample value".into()));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_minus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| r)
        .sum();
    let statistic = w_plus.min(w_minus);
    let n_nonzero = diffs.len();
    let p_value = if n_nonzero == 0 {
        1.0
    } else if n_nonzero <= EXACT_MAX_N {
        exact_p(&ranks, statistic)
    } else {
        normal_p(&ranks, &abs, statistic)
    };
    let decision = if a.len() < MIN_PAIRS {
        Decision::Inconclusive
    } else if n_nonzero == 0 {
        Decision::Similar
    } else if n_nonzero < MIN_PAIRS {
        Decision::Inconclusive
    } else if p_value < alpha {
        if w_plus > w_minus {
            Decision::FirstBetter
        } else {
            Decision::SecondBetter
        }
    } else {
        Decision::Similar
    };
    Ok(WilcoxonResult {
        statistic,
        w_plus,
        w_minus,
        n_nonzero,
        p_value,
        decision,
        alpha,
    })
}
