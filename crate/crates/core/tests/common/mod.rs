//! Fixtures and naive reference implementations shared by the integration
//! tests. The reference code follows the textbook formulas literally and
//! shares nothing with the library's evaluation paths.

#![allow(dead_code)]

use std::path::Path;

use fema_fs::dataset::LabeledDataset;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Values uniform in `[0, 1)`. Every class gets at least two samples, so
/// `m` is raised to `2c` when smaller.
pub fn random_dataset(rng: &mut impl Rng, m: usize, n: usize, c: usize) -> LabeledDataset {
    let m = m.max(2 * c);
    let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen()).collect()).collect();
    let labels: Vec<usize> = (0..m)
        .map(|i| if i < 2 * c { 1 + i % c } else { rng.gen_range(1..=c) })
        .collect();
    LabeledDataset::new(rows, labels, (0..n).map(|j| format!("f{j}")).collect(), c).unwrap()
}

/// 200 samples, two balanced classes. Features 0..10 are unit Gaussians
/// shifted by 2 for class 2; features 10..20 are class-independent uniform
/// noise.
pub fn informative_noise_dataset(seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(200);
    let mut labels = Vec::with_capacity(200);
    for i in 0..200 {
        let label = 1 + i % 2;
        let shift = if label == 2 { 2.0 } else { 0.0 };
        let mut row: Vec<f64> = (0..10).map(|_| gaussian(&mut rng) + shift).collect();
        row.extend((0..10).map(|_| rng.gen::<f64>()));
        rows.push(row);
        labels.push(label);
    }
    let names = (0..10)
        .map(|j| format!("informative_{j}"))
        .chain((0..10).map(|j| format!("noise_{j}")))
        .collect();
    LabeledDataset::new(rows, labels, names, 2).unwrap()
}

/// Writes the dataset as CSV with a trailing `class` column. Labels are
/// written as `a`/`b` so that sorted label order reproduces class ids.
pub fn write_dataset_csv(path: &Path, data: &LabeledDataset) {
    let mut writer = csv::Writer::from_path(path).unwrap();
    let mut header: Vec<String> = data.feature_names().to_vec();
    header.push("class".into());
    writer.write_record(&header).unwrap();
    for (i, row) in data.rows().enumerate() {
        let mut record: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        record.push(if data.labels()[i] == 1 { "a" } else { "b" }.into());
        writer.write_record(&record).unwrap();
    }
    writer.flush().unwrap();
}

#[allow(clippy::needless_range_loop)]
pub mod naive {
    use fema_fs::dataset::LabeledDataset;

    fn basis(distances: &[f64], k: f64) -> Vec<f64> {
        let hits: Vec<usize> = (0..distances.len()).filter(|&i| distances[i] < 1e-12).collect();
        if !hits.is_empty() {
            let mut phi = vec![0.0; distances.len()];
            for &i in &hits {
                phi[i] = 1.0 / hits.len() as f64;
            }
            return phi;
        }
        let w: Vec<f64> = distances.iter().map(|d| 1.0 / d.powf(k)).collect();
        let total: f64 = w.iter().sum();
        w.iter().map(|x| x / total).collect()
    }

    pub fn class_probabilities(data: &LabeledDataset, query: &[f64], k: f64) -> Vec<f64> {
        let distances: Vec<f64> = (0..data.n_samples())
            .map(|l| {
                let mut s = 0.0;
                for j in 0..data.n_features() {
                    s += (query[j] - data.value(l, j)).powi(2);
                }
                s.sqrt()
            })
            .collect();
        let phi = basis(&distances, k);
        let mut probs = vec![0.0; data.class_count()];
        for i in 0..data.class_count() {
            for l in 0..data.n_samples() {
                let rho = if data.labels()[l] == i + 1 { 1.0 } else { 0.0 };
                probs[i] += rho * phi[l];
            }
        }
        probs
    }

    /// `curves[class][t]` for feature `j` on the uniform grid of `p` points.
    pub fn feature_curves(data: &LabeledDataset, j: usize, p: usize, k: f64) -> Vec<Vec<f64>> {
        let mut curves = vec![vec![0.0; p]; data.class_count()];
        for t in 0..p {
            let q = t as f64 / (p - 1) as f64;
            let distances: Vec<f64> =
                (0..data.n_samples()).map(|l| (q - data.value(l, j)).abs()).collect();
            let phi = basis(&distances, k);
            for i in 0..data.class_count() {
                for l in 0..data.n_samples() {
                    if data.labels()[l] == i + 1 {
                        curves[i][t] += phi[l];
                    }
                }
            }
        }
        curves
    }

    pub fn overlap(curves: &[Vec<f64>]) -> f64 {
        let c = curves.len();
        let mut pair_means = Vec::new();
        for a in 0..c {
            for b in a + 1..c {
                let p = curves[a].len();
                let mut s = 0.0;
                for t in 0..p {
                    s += curves[a][t].min(curves[b][t]);
                }
                pair_means.push(s / p as f64);
            }
        }
        pair_means.iter().sum::<f64>() / pair_means.len() as f64
    }

    /// Chi-square through `sum(obs^2 / exp) - total`, algebraically equal to
    /// `sum((obs - exp)^2 / exp)`.
    pub fn chi2(data: &LabeledDataset, j: usize) -> f64 {
        let m = data.n_samples() as f64;
        let total: f64 = (0..data.n_samples()).map(|l| data.value(l, j)).sum();
        let mut stat = -total;
        for class in 1..=data.class_count() {
            let members: Vec<usize> =
                (0..data.n_samples()).filter(|&l| data.labels()[l] == class).collect();
            let observed: f64 = members.iter().map(|&l| data.value(l, j)).sum();
            let expected = members.len() as f64 / m * total;
            stat += observed * observed / expected;
        }
        stat
    }

    /// F through the total-minus-within decomposition of the sum of squares.
    pub fn anova_f(data: &LabeledDataset, j: usize) -> f64 {
        let m = data.n_samples();
        let c = data.class_count();
        let values: Vec<f64> = (0..m).map(|l| data.value(l, j)).collect();
        let mean = values.iter().sum::<f64>() / m as f64;
        let total_ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        let mut within_ss = 0.0;
        for class in 1..=c {
            let group: Vec<f64> = (0..m)
                .filter(|&l| data.labels()[l] == class)
                .map(|l| values[l])
                .collect();
            let g_mean = group.iter().sum::<f64>() / group.len() as f64;
            within_ss += group.iter().map(|v| (v - g_mean).powi(2)).sum::<f64>();
        }
        let between_ss = total_ss - within_ss;
        (between_ss / (c - 1) as f64) / (within_ss / (m - c) as f64)
    }
}
