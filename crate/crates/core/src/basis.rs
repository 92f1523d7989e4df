//! Shepard inverse-distance basis.
//!
//! The weight of training point `x_i` for a query `x` is `1 / |x - x_i|^k`;
//! the basis value is that weight divided by the sum of all weights, which
//! makes the basis a partition of unity that interpolates the training
//! points. When the query coincides with one or more training points
//! (distance below [`COINCIDENCE_EPS`]) the unit mass is split equally
//! among them.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::{Error, Result};

/// Distances below this are treated as exact coincidence.
pub const COINCIDENCE_EPS: f64 = 1e-12;

/// Exponent `k >= 1` applied to the inverse distance. Larger values put more
/// weight on the nearest training points.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SmoothnessParam(f64);

impl SmoothnessParam {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k >= 1.0 {
            Ok(Self(k))
        } else {
            Err(Error::InvalidParameter(format!(
                "smoothness k must be a finite value >= 1, got {k}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for SmoothnessParam {
    fn default() -> Self {
        Self(2.0)
    }
}

impl TryFrom<f64> for SmoothnessParam {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        Self::new(k)
    }
}

impl From<SmoothnessParam> for f64 {
    fn from(k: SmoothnessParam) -> f64 {
        k.0
    }
}

/// Result of evaluating the raw inverse-distance weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Finite(f64),
    /// The two points coincide; the weight diverges.
    Singular,
}

/// `1 / |a - b|^k` for vectors (Euclidean distance).
pub fn inverse_distance_weight(a: &[f64], b: &[f64], k: SmoothnessParam) -> Result<Weight> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(weight_from_distance(euclidean(a, b), k))
}

/// `1 / |a - b|^k` for scalars.
pub fn inverse_distance_weight_scalar(a: f64, b: f64, k: SmoothnessParam) -> Weight {
    weight_from_distance((a - b).abs(), k)
}

fn weight_from_distance(distance: f64, k: SmoothnessParam) -> Weight {
    if distance < COINCIDENCE_EPS {
        Weight::Singular
    } else {
        Weight::Finite(distance.powf(-k.0))
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Basis values of one query against every training sample, aligned with
/// the training rows. Non-negative and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisWeights(Vec<f64>);

impl BasisWeights {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Normalises inverse-distance weights from a list of distances.
///
/// Weights are evaluated as `(d_min / d_i)^k`, which differs from
/// `1 / d_i^k` only by a common factor that the normalisation removes, and
/// never overflows for large `k` or tiny distances.
pub(crate) fn shepard_from_distances(distances: &[f64], k: SmoothnessParam) -> Vec<f64> {
    let coincident = distances.iter().filter(|&&d| d < COINCIDENCE_EPS).count();
    if coincident > 0 {
        let share = 1.0 / coincident as f64;
        return distances
            .iter()
            .map(|&d| if d < COINCIDENCE_EPS { share } else { 0.0 })
            .collect();
    }
    let nearest = distances.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = distances
        .iter()
        .map(|&d| (nearest / d).powf(k.0))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Shepard basis of `query` over all training samples.
pub fn shepard_basis(
    query: &[f64],
    train: &LabeledDataset,
    k: SmoothnessParam,
) -> Result<BasisWeights> {
    if train.n_samples() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if query.len() != train.n_features() {
        return Err(Error::DimensionMismatch {
            expected: train.n_features(),
            found: query.len(),
        });
    }
    let distances: Vec<f64> = train.rows().map(|row| euclidean(query, row)).collect();
    Ok(BasisWeights(shepard_from_distances(&distances, k)))
}

/// Shepard basis of the scalar `q` against feature `j` of every training
/// sample, ignoring all other features.
pub fn shepard_basis_feature(
    q: f64,
    train: &LabeledDataset,
    feature_index: usize,
    k: SmoothnessParam,
) -> Result<BasisWeights> {
    if feature_index >= train.n_features() {
        return Err(Error::FeatureIndexOutOfRange {
            index: feature_index,
            n_features: train.n_features(),
        });
    }
    if train.n_samples() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let distances: Vec<f64> = train.column(feature_index).map(|x| (q - x).abs()).collect();
    Ok(BasisWeights(shepard_from_distances(&distances, k)))
}
