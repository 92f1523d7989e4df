use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("empty file: {0}")]
    EmptyFile(String),

    #[error("label column not found: {0}")]
    LabelColumnNotFound(String),

    #[error("categorical column not found: {0}")]
    CategoricalColumnNotFound(String),

    #[error("unparsable cell at row {row}, column '{column}': '{value}'")]
    UnparsableCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} has {found} cells, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("dataset has a single class; at least two are required")]
    SingleClass,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature index {index} out of range for {n_features} features")]
    FeatureIndexOutOfRange { index: usize, n_features: usize },

    #[error("duplicate feature index {0}")]
    DuplicateFeatureIndex(usize),

    #[error("class {class} has {count} samples, at least {required} required")]
    ClassTooSmall {
        class: usize,
        count: usize,
        required: usize,
    },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("value {value} at row {row}, feature {feature} is outside [0, 1]; normalise first")]
    NotNormalized { row: usize, feature: usize, value: f64 },

    #[error("negative value {value} at row {row}, feature {feature}")]
    NegativeValue { row: usize, feature: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("label {label} outside 1..={class_count}")]
    LabelOutOfRange { label: usize, class_count: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
