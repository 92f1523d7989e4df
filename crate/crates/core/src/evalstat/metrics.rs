use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Binary counts with respect to a declared positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Counts predictions against the truth, treating `positive` as the
/// positive class and every other class as negative.
pub fn confusion(
    predicted: &[usize],
    truth: &[usize],
    positive: usize,
    class_count: usize,
) -> Result<ConfusionMatrix> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("no predictions to score".into()));
    }
    let check = |label: usize| {
        if label == 0 || label > class_count {
            Err(Error::LabelOutOfRange { label, class_count })
        } else {
            Ok(())
        }
    };
    check(positive)?;
    let mut cm = ConfusionMatrix::default();
    for (&p, &t) in predicted.iter().zip(truth) {
        check(p)?;
        check(t)?;
        match (p == positive, t == positive) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Metrics whose denominator was zero; their value is reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ZeroDivision {
    pub f1: bool,
    pub tpr: bool,
    pub fpr: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub f1: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub zero_division: ZeroDivision,
}

fn ratio(num: u64, den: u64, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let mut flags = ZeroDivision::default();
    let mut unused = false;
    let accuracy = ratio(cm.tp + cm.tn, cm.total(), &mut unused);
    let f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn_, &mut flags.f1);
    let tpr = ratio(cm.tp, cm.tp + cm.fn_, &mut flags.tpr);
    let fpr = ratio(cm.fp, cm.fp + cm.tn, &mut flags.fpr);
    MetricsReport {
        accuracy,
        f1,
        tpr,
        fpr,
        zero_division: flags,
    }
}
