//! Overlap-based feature scoring (FEMa-FS).
//!
//! For each feature, a one-dimensional FEMa manifold is sampled on a grid
//! over `[0, 1]`: at every grid point `q` the probability of class `i` is
//! the Shepard-weighted share of training samples of class `i`, using only
//! that feature's values. A feature whose per-class curves barely intersect
//! separates the classes well. The overlap score is the mean, over grid
//! points, of the pointwise minimum between two class curves, averaged over
//! all class pairs. Lower is better.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{shepard_from_distances, SmoothnessParam};
use crate::dataset::LabeledDataset;
use crate::ranking::{Direction, FeatureRanking};
use crate::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 101;

/// Ordered sample points covering `[0, 1]`, endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid(Vec<f64>);

impl SamplingGrid {
    /// Uniform grid `t / (p - 1)` for `t = 0..p`.
    pub fn uniform(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 points, got {p}"
            )));
        }
        let denom = (p - 1) as f64;
        Ok(Self((0..p).map(|t| t as f64 / denom).collect()))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn build_grid(p: usize) -> Result<SamplingGrid> {
    SamplingGrid::uniform(p)
}

/// Per-class probability curves of one feature sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureManifold {
    pub feature_index: usize,
    class_count: usize,
    grid_len: usize,
    /// Row-major `c x p`; entry `(i, t)` is the class `i + 1` probability at
    /// grid point `t`.
    curves: Vec<f64>,
}

impl FeatureManifold {
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    /// Curve of class `label` (1-based).
    pub fn curve(&self, label: usize) -> &[f64] {
        let i = label - 1;
        &self.curves[i * self.grid_len..(i + 1) * self.grid_len]
    }

    pub fn value(&self, label: usize, t: usize) -> f64 {
        self.curves[(label - 1) * self.grid_len + t]
    }
}

fn manifold_from_column(
    feature_index: usize,
    column: &[f64],
    labels: &[usize],
    class_count: usize,
    grid: &SamplingGrid,
    k: SmoothnessParam,
) -> FeatureManifold {
    let p = grid.len();
    let mut curves = vec![0.0; class_count * p];
    let mut distances = vec![0.0; column.len()];
    for (t, &q) in grid.points().iter().enumerate() {
        for (d, &x) in distances.iter_mut().zip(column) {
            *d = (q - x).abs();
        }
        let phi = shepard_from_distances(&distances, k);
        for (&w, &label) in phi.iter().zip(labels) {
            curves[(label - 1) * p + t] += w;
        }
    }
    FeatureManifold {
        feature_index,
        class_count,
        grid_len: p,
        curves,
    }
}

/// Samples the per-class curves of feature `j` on the grid.
pub fn feature_manifold(
    train: &LabeledDataset,
    j: usize,
    grid: &SamplingGrid,
    k: SmoothnessParam,
) -> Result<FeatureManifold> {
    if j >= train.n_features() {
        return Err(Error::FeatureIndexOutOfRange {
            index: j,
            n_features: train.n_features(),
        });
    }
    let column: Vec<f64> = train.column(j).collect();
    Ok(manifold_from_column(
        j,
        &column,
        train.labels(),
        train.class_count(),
        grid,
        k,
    ))
}

/// Mean over class pairs of the grid-averaged pointwise minimum of the two
/// class curves. Binary problems reduce to `mean_t min(P1(q_t), P2(q_t))`.
pub fn overlap_score(manifold: &FeatureManifold) -> f64 {
    let c = manifold.class_count();
    if c < 2 {
        return 0.0;
    }
    let p = manifold.grid_len() as f64;
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 1..=c {
        for b in a + 1..=c {
            let sum: f64 = manifold
                .curve(a)
                .iter()
                .zip(manifold.curve(b))
                .map(|(x, y)| x.min(*y))
                .sum();
            total += sum / p;
            pairs += 1;
        }
    }
    total / pairs as f64
}

/// Overlap score of every feature, in feature order.
///
/// Features are evaluated in parallel; each score is computed with a fixed
/// summation order so the result does not depend on the thread count.
pub fn overlap_scores(
    train: &LabeledDataset,
    grid: &SamplingGrid,
    k: SmoothnessParam,
) -> Result<Vec<f64>> {
    train.check_normalized()?;
    Ok((0..train.n_features())
        .into_par_iter()
        .map(|j| {
            let column: Vec<f64> = train.column(j).collect();
            let manifold =
                manifold_from_column(j, &column, train.labels(), train.class_count(), grid, k);
            overlap_score(&manifold)
        })
        .collect())
}

/// Ranks features by ascending overlap score; ties go to the lower index
/// and constant features are placed last with their flag set.
pub fn rank_features(
    train: &LabeledDataset,
    grid: &SamplingGrid,
    k: SmoothnessParam,
) -> Result<FeatureRanking> {
    let scores = overlap_scores(train, grid, k)?;
    let constant: Vec<bool> = (0..train.n_features()).map(|j| train.is_constant(j)).collect();
    Ok(FeatureRanking::from_scores(
        &scores,
        Direction::LowerIsBetter,
        &constant,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::select_top;

    fn k(v: f64) -> SmoothnessParam {
        SmoothnessParam::new(v).unwrap()
    }

    fn data(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> LabeledDataset {
        let n = rows[0].len();
        let c = *labels.iter().max().unwrap();
        LabeledDataset::new(rows, labels, (0..n).map(|j| format!("f{j}")).collect(), c).unwrap()
    }

    #[test]
    fn grid_examples() {
        assert_eq!(build_grid(2).unwrap().points(), &[0.0, 1.0]);
        assert_eq!(build_grid(5).unwrap().points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(build_grid(1).is_err());
        let g = build_grid(101).unwrap();
        assert_eq!(g.points()[100], 1.0);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn manifold_interpolates_training_values() {
        let d = data(vec![vec![0.5], vec![0.0], vec![1.0]], vec![1, 2, 2]);
        let m = feature_manifold(&d, 0, &build_grid(5).unwrap(), k(2.0)).unwrap();
        assert_eq!(m.value(1, 2), 1.0);
        assert_eq!(m.value(2, 2), 0.0);
    }

    #[test]
    fn identical_columns_give_half_everywhere() {
        let d = data(
            vec![vec![0.1], vec![0.1], vec![0.7], vec![0.7]],
            vec![1, 2, 1, 2],
        );
        let m = feature_manifold(&d, 0, &build_grid(11).unwrap(), k(2.0)).unwrap();
        for t in 0..11 {
            assert!((m.value(1, t) - 0.5).abs() < 1e-12);
            assert!((m.value(2, t) - 0.5).abs() < 1e-12);
        }
        assert!((overlap_score(&m) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_point_hand_oracle() {
        let d = data(vec![vec![0.0], vec![1.0]], vec![1, 2]);
        let m = feature_manifold(&d, 0, &build_grid(5).unwrap(), k(1.0)).unwrap();
        assert!((m.value(1, 1) - 0.75).abs() < 1e-12);
        assert!((m.value(2, 1) - 0.25).abs() < 1e-12);
        assert!(feature_manifold(&d, 1, &build_grid(5).unwrap(), k(1.0)).is_err());
    }

    #[test]
    fn disjoint_halves_score_zero() {
        let m = FeatureManifold {
            feature_index: 0,
            class_count: 2,
            grid_len: 4,
            curves: vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
        };
        assert_eq!(overlap_score(&m), 0.0);
    }

    #[test]
    fn four_point_grid_oracle() {
        // brute-force evaluation on 101 grid points, computed independently
        let d = data(vec![vec![0.1], vec![0.2], vec![0.8], vec![0.9]], vec![1, 1, 2, 2]);
        let m = feature_manifold(&d, 0, &build_grid(101).unwrap(), k(2.0)).unwrap();
        assert!((overlap_score(&m) - 0.10082601013947144).abs() < 1e-10);
    }

    #[test]
    fn multiclass_mean_over_pairs() {
        let m = FeatureManifold {
            feature_index: 0,
            class_count: 3,
            grid_len: 2,
            curves: vec![0.5, 0.2, 0.5, 0.2, 0.0, 0.6],
        };
        // pairs: (1,2) -> (0.5 + 0.2)/2, (1,3) -> (0 + 0.2)/2, (2,3) -> (0 + 0.2)/2
        let expected = (0.35 + 0.1 + 0.1) / 3.0;
        assert!((overlap_score(&m) - expected).abs() < 1e-15);
    }

    #[test]
    fn separating_feature_first_constant_last() {
        let d = data(
            vec![
                vec![0.0, 0.0, 0.5],
                vec![0.1, 0.0, 0.2],
                vec![0.9, 0.0, 0.4],
                vec![1.0, 0.0, 0.9],
            ],
            vec![1, 1, 2, 2],
        );
        let r = rank_features(&d, &build_grid(101).unwrap(), k(2.0)).unwrap();
        assert_eq!(r.indices(), vec![0, 2, 1]);
        assert!(r.entries[2].constant);
        assert!(!r.entries[0].constant);
        assert_eq!(select_top(&r, 34.0).unwrap(), vec![0, 2]);
    }

    #[test]
    fn identical_features_tie_to_lower_index() {
        let d = data(
            vec![vec![0.3, 0.9, 0.3], vec![0.0, 0.1, 0.0], vec![1.0, 0.5, 1.0], vec![0.6, 0.0, 0.6]],
            vec![1, 2, 1, 2],
        );
        let r = rank_features(&d, &build_grid(51).unwrap(), k(2.0)).unwrap();
        let pos = |j| r.indices().iter().position(|&i| i == j).unwrap();
        assert!(pos(0) < pos(2));
        assert_eq!(r.entries[pos(0)].score, r.entries[pos(2)].score);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let d = data(vec![vec![2.0], vec![0.0]], vec![1, 2]);
        assert!(rank_features(&d, &build_grid(5).unwrap(), k(2.0)).is_err());
    }
}
