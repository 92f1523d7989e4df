//! Tabular dataset handling: CSV ingestion, ordinal encoding, min-max
//! normalisation and stratified splitting.
//!
//! Class labels are 1-based throughout the crate. String labels are mapped
//! to `1..=c` by their sorted order, so `{normal, anomaly}` becomes
//! `anomaly -> 1, normal -> 2`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Numeric feature matrix with 1-based integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// Row-major, `n_samples * n_features` values.
    values: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_count: usize,
}

impl LabeledDataset {
    /// Builds a dataset from rows, checking every structural invariant:
    /// rectangular rows, finite values, labels in `1..=class_count` and
    /// every class present at least once.
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_count: usize,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        let mut values = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::InvalidDataset(format!(
                    "row {i} has {} values, expected {n_features}",
                    row.len()
                )));
            }
            values.extend(row);
        }
        Self::from_flat(values, n_features, labels, feature_names, class_count)
    }

    /// Same as [`LabeledDataset::new`] with row-major storage supplied directly.
    pub fn from_flat(
        values: Vec<f64>,
        n_features: usize,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_count: usize,
    ) -> Result<Self> {
        if feature_names.len() != n_features {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {n_features} features",
                feature_names.len()
            )));
        }
        if values.len() != labels.len() * n_features {
            return Err(Error::InvalidDataset(format!(
                "{} values cannot form {} rows of {n_features} features",
                values.len(),
                labels.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::InvalidDataset("no samples".into()));
        }
        if class_count == 0 {
            return Err(Error::InvalidDataset("class count must be positive".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite value at row {}, feature {}",
                pos / n_features.max(1),
                pos % n_features.max(1)
            )));
        }
        let mut seen = vec![false; class_count];
        for &label in &labels {
            if label == 0 || label > class_count {
                return Err(Error::LabelOutOfRange { label, class_count });
            }
            seen[label - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidDataset(format!(
                "class {} has no samples",
                missing + 1
            )));
        }
        Ok(Self {
            values,
            n_features,
            labels,
            feature_names,
            class_count,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact panics on a zero chunk size
        (0..self.n_samples()).map(move |i| self.row(i))
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_features + j]
    }

    /// Values of feature `j`, one per sample.
    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_samples()).map(move |i| self.value(i, j))
    }

    /// Number of samples carrying each label, indexed by `label - 1`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &label in &self.labels {
            sizes[label - 1] += 1;
        }
        sizes
    }

    /// True when every sample has the same value for feature `j`.
    pub fn is_constant(&self, j: usize) -> bool {
        let first = self.value(0, j);
        self.column(j).all(|v| v == first)
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n_samples() {
                return Err(Error::InvalidDataset(format!(
                    "row index {i} out of range for {} samples",
                    self.n_samples()
                )));
            }
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::from_flat(
            values,
            self.n_features,
            labels,
            self.feature_names.clone(),
            self.class_count,
        )
    }

    /// Restricts the dataset to the given feature columns, in the given order.
    /// Indices must be in range and distinct.
    pub fn project(&self, subset: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_features];
        for &j in subset {
            if j >= self.n_features {
                return Err(Error::FeatureIndexOutOfRange {
                    index: j,
                    n_features: self.n_features,
                });
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::DuplicateFeatureIndex(j));
            }
        }
        let mut values = Vec::with_capacity(self.n_samples() * subset.len());
        for row in self.rows() {
            values.extend(subset.iter().map(|&j| row[j]));
        }
        Ok(Self {
            values,
            n_features: subset.len(),
            labels: self.labels.clone(),
            feature_names: subset.iter().map(|&j| self.feature_names[j].clone()).collect(),
            class_count: self.class_count,
        })
    }

    /// Checks that every value lies in `[0, 1]`.
    pub fn check_normalized(&self) -> Result<()> {
        for (pos, &value) in self.values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::NotNormalized {
                    row: pos / self.n_features,
                    feature: pos % self.n_features,
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Unparsed CSV contents: header plus string cells.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    source: String,
}

/// Reads a comma-separated file with a header row. Cells are trimmed.
pub fn read_raw_csv(path: impl AsRef<Path>) -> Result<RawTable> {
    let path = path.as_ref();
    let source = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: source.clone(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::EmptyFile(source));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: headers.len(),
                found: record.len(),
            });
        }
        rows.push(record.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile(source));
    }
    Ok(RawTable {
        headers,
        rows,
        source,
    })
}

/// How string columns of a table become numbers.
///
/// Fitted once (possibly over several tables, e.g. a fixed train/test pair)
/// so that every table shares the same label and category codes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoding {
    pub label_column: String,
    /// Sorted distinct label strings; position + 1 is the class id.
    pub label_values: Vec<String>,
    /// Sorted distinct values per categorical column; position is the code.
    pub categories: BTreeMap<String, Vec<String>>,
}

impl Encoding {
    pub fn fit(tables: &[&RawTable], label_column: &str, categorical: &[String]) -> Result<Self> {
        let mut labels = BTreeSet::new();
        let mut categories: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for table in tables {
            let label_idx = column_index(table, label_column)
                .ok_or_else(|| Error::LabelColumnNotFound(label_column.to_owned()))?;
            for row in &table.rows {
                labels.insert(row[label_idx].clone());
            }
            for name in categorical {
                let idx = column_index(table, name)
                    .ok_or_else(|| Error::CategoricalColumnNotFound(name.clone()))?;
                let set = categories.entry(name.clone()).or_default();
                set.extend(table.rows.iter().map(|row| row[idx].clone()));
            }
        }
        if labels.len() < 2 {
            return Err(Error::SingleClass);
        }
        Ok(Self {
            label_column: label_column.to_owned(),
            label_values: labels.into_iter().collect(),
            categories: categories
                .into_iter()
                .map(|(k, v)| (k, v.into_iter().collect()))
                .collect(),
        })
    }

    pub fn class_count(&self) -> usize {
        self.label_values.len()
    }

    /// Class id (1-based) of a label string.
    pub fn class_of(&self, label: &str) -> Option<usize> {
        self.label_values
            .binary_search_by(|v| v.as_str().cmp(label))
            .ok()
            .map(|i| i + 1)
    }

    /// Converts a raw table into a dataset. Non-label, non-categorical
    /// columns must parse as finite reals.
    pub fn encode(&self, table: &RawTable) -> Result<LabeledDataset> {
        let label_idx = column_index(table, &self.label_column)
            .ok_or_else(|| Error::LabelColumnNotFound(self.label_column.clone()))?;
        let mut columns = Vec::new();
        for (idx, name) in table.headers.iter().enumerate() {
            if idx == label_idx {
                continue;
            }
            columns.push((idx, name.clone(), self.categories.get(name)));
        }
        let n_features = columns.len();
        let mut values = Vec::with_capacity(table.rows.len() * n_features);
        let mut labels = Vec::with_capacity(table.rows.len());
        for (r, row) in table.rows.iter().enumerate() {
            let label = self.class_of(&row[label_idx]).ok_or_else(|| Error::UnparsableCell {
                row: r + 1,
                column: self.label_column.clone(),
                value: row[label_idx].clone(),
            })?;
            labels.push(label);
            for (idx, name, codes) in &columns {
                let cell = &row[*idx];
                let value = match codes {
                    Some(codes) => codes
                        .binary_search(cell)
                        .map(|code| code as f64)
                        .ok(),
                    None => cell.parse::<f64>().ok().filter(|v| v.is_finite()),
                };
                values.push(value.ok_or_else(|| Error::UnparsableCell {
                    row: r + 1,
                    column: name.clone(),
                    value: cell.clone(),
                })?);
            }
        }
        let names = columns.into_iter().map(|(_, name, _)| name).collect();
        LabeledDataset::from_flat(values, n_features, labels, names, self.class_count()).map_err(
            |e| match e {
                Error::InvalidDataset(msg) => {
                    Error::InvalidDataset(format!("{}: {msg}", table.source))
                }
                other => other,
            },
        )
    }
}

fn column_index(table: &RawTable, name: &str) -> Option<usize> {
    table.headers.iter().position(|h| h == name)
}

/// Loads a CSV file into a dataset.
///
/// Categorical columns are encoded ordinally (sorted distinct strings map to
/// `0, 1, 2, ...`), labels map to `1..=c` by sorted order and every other
/// column is parsed as a real number. Quoted cells containing commas are
/// not part of the supported format.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    categorical_columns: &[String],
) -> Result<LabeledDataset> {
    let table = read_raw_csv(path)?;
    let encoding = Encoding::fit(&[&table], label_column, categorical_columns)?;
    encoding.encode(&table)
}

/// Loads a fixed train/test pair with a shared encoding.
pub fn load_csv_pair(
    train_path: impl AsRef<Path>,
    test_path: impl AsRef<Path>,
    label_column: &str,
    categorical_columns: &[String],
) -> Result<(LabeledDataset, LabeledDataset)> {
    let train = read_raw_csv(train_path)?;
    let test = read_raw_csv(test_path)?;
    if train.headers != test.headers {
        return Err(Error::InvalidDataset(
            "train and test files have different headers".into(),
        ));
    }
    let encoding = Encoding::fit(&[&train, &test], label_column, categorical_columns)?;
    Ok((encoding.encode(&train)?, encoding.encode(&test)?))
}

/// Per-feature training minimum and maximum used for min-max scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationStats {
    pub fn n_features(&self) -> usize {
        self.min.len()
    }

    /// Features whose training range is a single point.
    pub fn is_constant(&self, j: usize) -> bool {
        self.max[j] <= self.min[j]
    }

    /// Maps one raw value of feature `j` into `[0, 1]`.
    pub fn scale(&self, j: usize, value: f64) -> f64 {
        let (lo, hi) = (self.min[j], self.max[j]);
        if hi <= lo {
            return 0.0;
        }
        ((value - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// Computes per-feature minima and maxima over the training samples.
pub fn fit_normalizer(train: &LabeledDataset) -> NormalizationStats {
    let n = train.n_features();
    let mut min = vec![f64::INFINITY; n];
    let mut max = vec![f64::NEG_INFINITY; n];
    for row in train.rows() {
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    NormalizationStats { min, max }
}

/// Applies `(x - min) / (max - min)`, clamping to `[0, 1]`.
/// Constant features map to 0.
pub fn apply_normalizer(stats: &NormalizationStats, data: &LabeledDataset) -> Result<LabeledDataset> {
    if stats.n_features() != data.n_features() {
        return Err(Error::DimensionMismatch {
            expected: stats.n_features(),
            found: data.n_features(),
        });
    }
    let n = data.n_features();
    let values = data
        .values
        .iter()
        .enumerate()
        .map(|(pos, &v)| stats.scale(pos % n, v))
        .collect();
    Ok(LabeledDataset {
        values,
        ..data.clone()
    })
}

/// Splits every class independently so class proportions carry over to both
/// sides. Each class contributes `round(size * test_fraction)` test samples,
/// kept within `1..size`, so both partitions contain every class.
/// Output rows keep their original relative order.
pub fn stratified_split(
    data: &LabeledDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut by_class = vec![Vec::new(); data.class_count()];
    for (i, &label) in data.labels().iter().enumerate() {
        by_class[label - 1].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::with_capacity(data.n_samples());
    let mut test_idx = Vec::new();
    for (c, mut members) in by_class.into_iter().enumerate() {
        if members.len() < 2 {
            return Err(Error::ClassTooSmall {
                class: c + 1,
                count: members.len(),
                required: 2,
            });
        }
        members.shuffle(&mut rng);
        let size = members.len();
        let n_test = ((size as f64 * test_fraction).round() as usize).clamp(1, size - 1);
        test_idx.extend_from_slice(&members[..n_test]);
        train_idx.extend_from_slice(&members[n_test..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((data.select_rows(&train_idx)?, data.select_rows(&test_idx)?))
}
