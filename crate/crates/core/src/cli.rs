//! `femafs` command-line front end.
//!
//! Settings resolve as command-line flag, then `--config` TOML file, then
//! built-in default. Exit codes: 0 success, 1 pipeline error, 2 usage error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::basis::SmoothnessParam;
use crate::dataset::{
    apply_normalizer, fit_normalizer, read_raw_csv, stratified_split, Encoding, LabeledDataset,
    RawTable,
};
use crate::evalstat::experiment::{
    default_percents, evaluate_subset, rank_with, run_experiment, selected_features,
    ClassifierKind, ExperimentConfig, SelectorKind,
};
use crate::evalstat::metrics::{ConfusionMatrix, MetricsReport};
use crate::evalstat::report::{read_report_json, write_report_files};
use crate::overlap::{SamplingGrid, DEFAULT_GRID_SIZE};
use crate::ranking::{ranking_records, write_ranking_csv, write_ranking_json};
use crate::Error;

pub const THREADS_ENV: &str = "FEMAFS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "femafs", version, about = "Finite Element Machine feature selection toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank all features and write ranking.json / ranking.csv
    Rank(CommonArgs),
    /// Keep the top percentage of ranked features and write the projected CSV
    Select(CommonArgs),
    /// Train and score one classifier on one selection
    Evaluate(CommonArgs),
    /// Repeated-trial comparison of selectors over retention scenarios
    Compare(CommonArgs),
    /// Re-emit tables and charts from an existing report.json
    Report(ReportArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with default settings
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input CSV (header row required)
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Separate test CSV; when absent a stratified split is drawn
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Name of the label column
    #[arg(long)]
    pub label: Option<String>,
    /// Columns to encode ordinally (repeat or comma-separate)
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Smoothness exponent of the Shepard basis
    #[arg(long)]
    pub k: Option<f64>,
    /// Number of sampling points on [0, 1]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Retention percentages (repeat or comma-separate)
    #[arg(long, value_delimiter = ',')]
    pub percent: Vec<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// femafs | chi2 | anova | none | random (repeat or comma-separate)
    #[arg(long, value_delimiter = ',')]
    pub selector: Vec<String>,
    /// knn | fema
    #[arg(long)]
    pub classifier: Option<String>,
    /// Neighbours for the knn classifier
    #[arg(long)]
    pub neighbors: Option<usize>,
    /// Significance level of the Wilcoxon test
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fraction of each class held out for testing
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Label value treated as the positive class (default: first in sorted order)
    #[arg(long)]
    pub positive: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write SVG bar charts (compare)
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// report.json written by `compare`
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

/// Settings accepted from a `--config` file. Keys mirror the flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub label: Option<String>,
    pub categorical: Option<Vec<String>>,
    pub k: Option<f64>,
    pub grid: Option<usize>,
    pub percent: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub selector: Option<Vec<String>>,
    pub classifier: Option<String>,
    pub neighbors: Option<usize>,
    pub alpha: Option<f64>,
    pub test_fraction: Option<f64>,
    pub positive: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Pipeline(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Pipeline(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub data: PathBuf,
    pub test: Option<PathBuf>,
    pub label: String,
    pub categorical: Vec<String>,
    pub positive: Option<String>,
    pub out: PathBuf,
    pub svg: bool,
    pub experiment: ExperimentConfig,
    /// Whether percentages came from a flag or the config file.
    pub percent_given: bool,
}

fn load_file_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    if v.is_empty() {
        None
    } else {
        Some(v)
    }
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => load_file_config(path)?,
            None => FileConfig::default(),
        };
        let data = args
            .data
            .clone()
            .or(file.data)
            .ok_or_else(|| CliError::Usage("--data is required".into()))?;
        let label = args
            .label
            .clone()
            .or(file.label)
            .ok_or_else(|| CliError::Usage("--label is required".into()))?;
        let defaults = ExperimentConfig::default();
        let k = args.k.or(file.k).unwrap_or(defaults.k.get());
        let k = SmoothnessParam::new(k).map_err(|e| CliError::Usage(e.to_string()))?;
        let selector_names = non_empty(args.selector.clone()).or(file.selector);
        let selectors = match selector_names {
            Some(names) => names
                .iter()
                .map(|s| s.parse::<SelectorKind>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
            None => defaults.selectors.clone(),
        };
        let classifier = match args.classifier.clone().or(file.classifier) {
            Some(c) => c
                .parse::<ClassifierKind>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
            None => defaults.classifier,
        };
        let percent_arg = non_empty(args.percent.clone()).or(file.percent);
        let percent_given = percent_arg.is_some();
        let experiment = ExperimentConfig {
            k,
            grid_size: args.grid.or(file.grid).unwrap_or(DEFAULT_GRID_SIZE),
            percents: percent_arg.unwrap_or_else(default_percents),
            trials: args.trials.or(file.trials).unwrap_or(defaults.trials),
            seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
            selectors,
            classifier,
            neighbors: args.neighbors.or(file.neighbors).unwrap_or(defaults.neighbors),
            alpha: args.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            test_fraction: args
                .test_fraction
                .or(file.test_fraction)
                .unwrap_or(defaults.test_fraction),
            positive_class: 1,
        };
        experiment
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Self {
            data,
            test: args.test.clone().or(file.test),
            label,
            categorical: non_empty(args.categorical.clone())
                .or(file.categorical)
                .unwrap_or_default(),
            positive: args.positive.clone().or(file.positive),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            svg: args.svg,
            experiment,
            percent_given,
        })
    }

    fn single_selector(&self) -> CliResult<SelectorKind> {
        match self.experiment.selectors.as_slice() {
            [one] => Ok(*one),
            _ if self.experiment.selectors == ExperimentConfig::default().selectors => {
                Ok(SelectorKind::Femafs)
            }
            _ => Err(CliError::Usage("this command takes a single --selector".into())),
        }
    }

    fn single_percent(&self) -> CliResult<f64> {
        match (self.percent_given, self.experiment.percents.as_slice()) {
            (false, _) => Ok(100.0),
            (true, [one]) => Ok(*one),
            _ => Err(CliError::Usage("this command takes a single --percent".into())),
        }
    }
}

/// Loaded input: the encoding plus the main dataset and, if given, the test set.
struct Inputs {
    encoding: Encoding,
    raw: RawTable,
    data: LabeledDataset,
    test: Option<LabeledDataset>,
    positive_class: usize,
}

fn load_inputs(settings: &Settings) -> CliResult<Inputs> {
    let raw = read_raw_csv(&settings.data)?;
    let raw_test = settings.test.as_ref().map(read_raw_csv).transpose()?;
    let mut tables = vec![&raw];
    if let Some(t) = &raw_test {
        if t.headers != raw.headers {
            return Err(Error::InvalidDataset(
                "train and test files have different headers".into(),
            )
            .into());
        }
        tables.push(t);
    }
    let encoding = Encoding::fit(&tables, &settings.label, &settings.categorical)?;
    let data = encoding.encode(&raw)?;
    let test = raw_test.as_ref().map(|t| encoding.encode(t)).transpose()?;
    let positive_class = match &settings.positive {
        Some(label) => encoding.class_of(label).ok_or_else(|| {
            CliError::Usage(format!(
                "--positive '{label}' is not a value of column '{}'",
                settings.label
            ))
        })?,
        None => 1,
    };
    Ok(Inputs {
        encoding,
        raw,
        data,
        test,
        positive_class,
    })
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| {
        Error::Io {
            path: dir.display().to_string(),
            source,
        }
        .into()
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn normalized_full(data: &LabeledDataset) -> CliResult<LabeledDataset> {
    Ok(apply_normalizer(&fit_normalizer(data), data)?)
}

fn cmd_rank(settings: &Settings) -> CliResult<()> {
    let selector = settings.single_selector()?;
    let inputs = load_inputs(settings)?;
    let data = normalized_full(&inputs.data)?;
    let grid = SamplingGrid::uniform(settings.experiment.grid_size)?;
    let ranking = rank_with(selector, &data, settings.experiment.k, &grid, settings.experiment.seed)?;
    let records = ranking_records(&ranking, &data);
    create_dir(&settings.out)?;
    write_ranking_json(settings.out.join("ranking.json"), &records)?;
    write_ranking_csv(settings.out.join("ranking.csv"), &records)?;
    println!(
        "ranked {} features with {} -> {}",
        records.len(),
        selector.name(),
        settings.out.join("ranking.json").display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct SelectedFeature {
    index: usize,
    name: String,
}

#[derive(Debug, Serialize)]
struct Selection {
    selector: SelectorKind,
    percent: f64,
    features: Vec<SelectedFeature>,
}

fn cmd_select(settings: &Settings) -> CliResult<()> {
    let selector = settings.single_selector()?;
    let percent = settings.single_percent()?;
    let inputs = load_inputs(settings)?;
    let data = normalized_full(&inputs.data)?;
    let grid = SamplingGrid::uniform(settings.experiment.grid_size)?;
    let ranking = rank_with(selector, &data, settings.experiment.k, &grid, settings.experiment.seed)?;
    let subset = selected_features(selector, &ranking, percent)?;
    let names = data.feature_names();
    let selection = Selection {
        selector,
        percent,
        features: subset
            .iter()
            .map(|&index| SelectedFeature {
                index,
                name: names[index].clone(),
            })
            .collect(),
    };
    create_dir(&settings.out)?;
    write_json(&settings.out.join("selected.json"), &selection)?;

    // projected copy of the original cells, label last
    let mut columns: Vec<usize> = subset
        .iter()
        .map(|&j| {
            inputs
                .raw
                .headers
                .iter()
                .position(|h| *h == names[j])
                .expect("feature names come from the header")
        })
        .collect();
    columns.push(
        inputs
            .raw
            .headers
            .iter()
            .position(|h| *h == inputs.encoding.label_column)
            .expect("label column was resolved"),
    );
    let path = settings.out.join("selected.csv");
    let mut writer = csv::Writer::from_path(&path).map_err(Error::from)?;
    writer
        .write_record(columns.iter().map(|&c| &inputs.raw.headers[c]))
        .map_err(Error::from)?;
    for row in &inputs.raw.rows {
        writer
            .write_record(columns.iter().map(|&c| &row[c]))
            .map_err(Error::from)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    println!(
        "kept {} of {} features ({}%) -> {}",
        subset.len(),
        data.n_features(),
        percent,
        path.display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct Evaluation {
    selector: SelectorKind,
    classifier: ClassifierKind,
    percent: f64,
    positive: String,
    features: Vec<String>,
    confusion: ConfusionMatrix,
    metrics: MetricsReport,
}

fn cmd_evaluate(settings: &Settings) -> CliResult<()> {
    let selector = settings.single_selector()?;
    let percent = settings.single_percent()?;
    let inputs = load_inputs(settings)?;
    let mut config = settings.experiment.clone();
    config.positive_class = inputs.positive_class;
    let (train, test) = match &inputs.test {
        Some(test) => (inputs.data.clone(), test.clone()),
        None => stratified_split(&inputs.data, config.test_fraction, config.seed)?,
    };
    let stats = fit_normalizer(&train);
    let train = apply_normalizer(&stats, &train)?;
    let test = apply_normalizer(&stats, &test)?;
    let grid = SamplingGrid::uniform(config.grid_size)?;
    let ranking = rank_with(selector, &train, config.k, &grid, config.seed)?;
    let subset = selected_features(selector, &ranking, percent)?;
    let (confusion, metrics) = evaluate_subset(&train, &test, &subset, &config)?;
    let evaluation = Evaluation {
        selector,
        classifier: config.classifier,
        percent,
        positive: inputs.encoding.label_values[inputs.positive_class - 1].clone(),
        features: subset.iter().map(|&j| train.feature_names()[j].clone()).collect(),
        confusion,
        metrics,
    };
    create_dir(&settings.out)?;
    let path = settings.out.join("evaluation.json");
    write_json(&path, &evaluation)?;
    println!(
        "accuracy {:.4}  f1 {:.4}  tpr {:.4}  fpr {:.4} -> {}",
        metrics.accuracy,
        metrics.f1,
        metrics.tpr,
        metrics.fpr,
        path.display()
    );
    Ok(())
}

fn cmd_compare(settings: &Settings) -> CliResult<()> {
    if settings.experiment.selectors.len() < 2 {
        return Err(CliError::Usage("compare needs at least two selectors".into()));
    }
    if settings.test.is_some() {
        return Err(CliError::Usage(
            "compare draws its own splits; --test is not accepted".into(),
        ));
    }
    let inputs = load_inputs(settings)?;
    let mut config = settings.experiment.clone();
    config.positive_class = inputs.positive_class;
    let report = run_experiment(&inputs.data, &config)?;
    let written = write_report_files(&settings.out, &report, settings.svg)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> CliResult<()> {
    let report = read_report_json(&args.input)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    for cell in &report.cells {
        println!(
            "{:<10} {:>5}%  f1 {:.4} ± {:.4}  acc {:.4} ± {:.4}",
            cell.method, cell.percent, cell.f1.mean, cell.f1.std, cell.accuracy.mean, cell.accuracy.std
        );
    }
    for path in write_report_files(&out, &report, args.svg)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn thread_count() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// Runs one parsed command inside a worker pool capped by `FEMAFS_THREADS`.
pub fn run(cli: Cli) -> CliResult<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Rank(args) => cmd_rank(&Settings::resolve(args)?),
        Command::Select(args) => cmd_select(&Settings::resolve(args)?),
        Command::Evaluate(args) => cmd_evaluate(&Settings::resolve(args)?),
        Command::Compare(args) => cmd_compare(&Settings::resolve(args)?),
        Command::Report(args) => cmd_report(args),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> CommonArgs {
        CommonArgs {
            data: Some("d.csv".into()),
            label: Some("class".into()),
            ..CommonArgs::default()
        }
    }

    #[test]
    fn defaults_apply() {
        let s = Settings::resolve(&args()).unwrap();
        assert_eq!(s.experiment.k.get(), 2.0);
        assert_eq!(s.experiment.grid_size, 101);
        assert_eq!(s.experiment.trials, 25);
        assert_eq!(s.experiment.alpha, 0.05);
        assert_eq!(s.experiment.percents, default_percents());
        assert_eq!(s.experiment.percents.len(), 11);
        assert!(!s.percent_given);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "k = 4.0\ntrials = 3\ngrid = 11\nlabel = \"y\"\n").unwrap();
        let s = Settings::resolve(&CommonArgs {
            config: Some(path),
            k: Some(1.5),
            ..args()
        })
        .unwrap();
        assert_eq!(s.experiment.k.get(), 1.5);
        assert_eq!(s.experiment.trials, 3);
        assert_eq!(s.experiment.grid_size, 11);
        assert_eq!(s.label, "class");
    }

    #[test]
    fn missing_label_is_a_usage_error() {
        let err = Settings::resolve(&CommonArgs {
            label: None,
            ..args()
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_values_are_usage_errors() {
        for bad in [
            CommonArgs { k: Some(0.5), ..args() },
            CommonArgs { percent: vec![0.0], ..args() },
            CommonArgs { selector: vec!["pca".into()], ..args() },
            CommonArgs { classifier: Some("svm".into()), ..args() },
            CommonArgs { trials: Some(0), ..args() },
        ] {
            assert_eq!(Settings::resolve(&bad).unwrap_err().exit_code(), 2);
        }
    }
}
