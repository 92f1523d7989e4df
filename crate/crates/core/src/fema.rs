//! Finite Element Machine classifier.
//!
//! Training is lazy: the model keeps the (normalised) training matrix and a
//! one-hot class assignment per sample. At query time the class
//! probabilities are the basis-weighted sums of those assignments.

use rayon::prelude::*;

use crate::basis::{shepard_basis, SmoothnessParam};
use crate::dataset::LabeledDataset;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct FemaModel {
    train: LabeledDataset,
    /// Row-major `m x c` class assignment of each training sample.
    rho: Vec<f64>,
    k: SmoothnessParam,
}

/// Per-class probabilities for one query, indexed by `label - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProbabilities(Vec<f64>);

impl ClassProbabilities {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Most probable class (1-based); ties go to the lowest class id.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate().skip(1) {
            if p > self.0[best] {
                best = i;
            }
        }
        best + 1
    }

    /// Share of the total probability held by the predicted class.
    pub fn certainty(&self) -> f64 {
        let total: f64 = self.0.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        self.0[self.argmax() - 1] / total
    }
}

/// Builds the model. The training data must already be scaled to `[0, 1]`.
pub fn fema_train(train: &LabeledDataset, k: SmoothnessParam) -> Result<FemaModel> {
    train.check_normalized()?;
    let c = train.class_count();
    if let Some(empty) = train.class_sizes().iter().position(|&s| s == 0) {
        return Err(Error::ClassTooSmall {
            class: empty + 1,
            count: 0,
            required: 1,
        });
    }
    let mut rho = vec![0.0; train.n_samples() * c];
    for (j, &label) in train.labels().iter().enumerate() {
        rho[j * c + label - 1] = 1.0;
    }
    Ok(FemaModel {
        train: train.clone(),
        rho,
        k,
    })
}

impl FemaModel {
    pub fn class_count(&self) -> usize {
        self.train.class_count()
    }

    pub fn n_features(&self) -> usize {
        self.train.n_features()
    }

    pub fn smoothness(&self) -> SmoothnessParam {
        self.k
    }

    /// Class assignment row of training sample `j`.
    pub fn rho(&self, j: usize) -> &[f64] {
        let c = self.class_count();
        &self.rho[j * c..(j + 1) * c]
    }

    pub fn class_probabilities(&self, query: &[f64]) -> Result<ClassProbabilities> {
        let phi = shepard_basis(query, &self.train, self.k)?;
        let c = self.class_count();
        let mut probs = vec![0.0; c];
        for (j, &weight) in phi.as_slice().iter().enumerate() {
            for (p, &r) in probs.iter_mut().zip(self.rho(j)) {
                *p += r * weight;
            }
        }
        Ok(ClassProbabilities(probs))
    }

    pub fn predict(&self, query: &[f64]) -> Result<usize> {
        Ok(self.class_probabilities(query)?.argmax())
    }

    pub fn certainty(&self, query: &[f64]) -> Result<f64> {
        Ok(self.class_probabilities(query)?.certainty())
    }

    /// Predicts every row of `data`. Rows are evaluated in parallel; the
    /// output order matches the input.
    pub fn predict_batch(&self, data: &LabeledDataset) -> Result<Vec<usize>> {
        (0..data.n_samples())
            .into_par_iter()
            .map(|i| self.predict(data.row(i)))
            .collect()
    }
}

/// Free-function forms mirroring the model methods.
pub fn fema_class_probabilities(model: &FemaModel, query: &[f64]) -> Result<ClassProbabilities> {
    model.class_probabilities(query)
}

pub fn fema_predict(model: &FemaModel, query: &[f64]) -> Result<usize> {
    model.predict(query)
}

pub fn fema_certainty(model: &FemaModel, query: &[f64]) -> Result<f64> {
    model.certainty(query)
}
