mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{informative_noise_dataset, write_dataset_csv};
use serde_json::Value;

fn femafs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_femafs"))
        .args(args)
        .env("FEMAFS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn dataset_file(dir: &Path) -> String {
    let path = dir.join("data.csv");
    write_dataset_csv(&path, &informative_noise_dataset(7));
    path.display().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn rank_writes_one_record_per_feature() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let out = dir.path().join("out");
    let run = femafs(&["rank", "--data", &data, "--label", "class", "--out", out.to_str().unwrap()]);
    assert_success(&run);
    let records = read_json(&out.join("ranking.json"));
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 20);
    let scores: Vec<f64> = records.iter().map(|r| r["score"].as_f64().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] <= w[1]));
    assert!(out.join("ranking.csv").exists());
}

#[test]
fn chi2_ranking_is_descending() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let out = dir.path().join("out");
    let run = femafs(&[
        "rank", "--data", &data, "--label", "class", "--selector", "chi2", "--out",
        out.to_str().unwrap(),
    ]);
    assert_success(&run);
    let records = read_json(&out.join("ranking.json"));
    let scores: Vec<f64> = records
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["score"].as_f64().unwrap())
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn missing_label_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let run = femafs(&["rank", "--data", &data]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn unknown_label_column_is_a_pipeline_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let out = dir.path().join("out");
    let run = femafs(&["rank", "--data", &data, "--label", "nope", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("nope"));
}

#[test]
fn select_keeps_requested_share_and_label() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let out = dir.path().join("out");
    let run = femafs(&[
        "select", "--data", &data, "--label", "class", "--percent", "25", "--out",
        out.to_str().unwrap(),
    ]);
    assert_success(&run);
    let selection = read_json(&out.join("selected.json"));
    assert_eq!(selection["features"].as_array().unwrap().len(), 5);
    let csv = std::fs::read_to_string(out.join("selected.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 6);
    assert!(header.ends_with(",class"));
    assert_eq!(csv.lines().count(), 201);
}

fn evaluate(dir: &Path, data: &str, extra: &[&str], name: &str) -> Value {
    let out = dir.join(name);
    let mut args = vec!["evaluate", "--data", data, "--label", "class", "--seed", "3"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let run = femafs(&args);
    assert_success(&run);
    read_json(&out.join("evaluation.json"))
}

#[test]
fn full_selection_matches_no_selection() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let all = evaluate(dir.path(), &data, &["--percent", "100"], "all");
    let none = evaluate(dir.path(), &data, &["--selector", "none", "--percent", "100"], "none");
    assert_eq!(all["confusion"], none["confusion"]);
    assert_eq!(all["metrics"], none["metrics"]);
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let a = evaluate(dir.path(), &data, &["--percent", "40"], "a");
    let b = evaluate(dir.path(), &data, &["--percent", "40"], "b");
    assert_eq!(a, b);
}

#[test]
fn nearest_neighbour_on_its_own_training_set_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let result = evaluate(
        dir.path(),
        &data,
        &["--test", &data, "--percent", "100", "--neighbors", "1"],
        "resub",
    );
    assert_eq!(result["metrics"]["accuracy"].as_f64(), Some(1.0));
}

fn table_cells(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .flat_map(|line| line.split(',').skip(1).map(str::to_owned).collect::<Vec<_>>())
        .collect()
}

#[test]
fn identical_methods_compare_as_similar() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let out = dir.path().join("out");
    let run = femafs(&[
        "compare", "--data", &data, "--label", "class", "--selector", "femafs,femafs", "--trials",
        "5", "--percent", "20,50", "--grid", "21", "--out", out.to_str().unwrap(),
    ]);
    assert_success(&run);
    let cells = table_cells(&out.join("wilcoxon_f1.csv"));
    assert_eq!(cells.len(), 2);
    assert!(cells.iter().all(|c| c == "="), "{cells:?}");
}

#[test]
fn single_trial_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let out = dir.path().join("out");
    let run = femafs(&[
        "compare", "--data", &data, "--label", "class", "--selector", "femafs,chi2,none",
        "--trials", "1", "--percent", "30", "--grid", "21", "--out", out.to_str().unwrap(),
    ]);
    assert_success(&run);
    for table in ["wilcoxon_f1.csv", "wilcoxon_accuracy.csv"] {
        let cells = table_cells(&out.join(table));
        assert_eq!(cells.len(), 2);
        assert!(cells.iter().all(|c| c == "n/a"), "{cells:?}");
    }
}

#[test]
fn compare_needs_two_selectors() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let run = femafs(&["compare", "--data", &data, "--label", "class", "--selector", "femafs"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn report_reproduces_compare_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let run = femafs(&[
        "compare", "--data", &data, "--label", "class", "--selector", "femafs,anova,random",
        "--trials", "5", "--percent", "30,60", "--grid", "21", "--out", first.to_str().unwrap(),
    ]);
    assert_success(&run);
    let run = femafs(&[
        "report", "--input", first.join("report.json").to_str().unwrap(), "--out",
        second.to_str().unwrap(), "--svg",
    ]);
    assert_success(&run);
    for name in ["report.json", "wilcoxon_f1.csv", "wilcoxon_accuracy.csv", "metrics.csv"] {
        assert_eq!(
            std::fs::read(first.join(name)).unwrap(),
            std::fs::read(second.join(name)).unwrap(),
            "{name}"
        );
    }
    assert!(second.join("f1.svg").exists());
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset_file(dir.path());
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "label = \"class\"\nselector = [\"anova\"]\n").unwrap();
    let out = dir.path().join("out");
    let run = femafs(&[
        "rank", "--config", config.to_str().unwrap(), "--data", &data, "--out",
        out.to_str().unwrap(),
    ]);
    assert_success(&run);
    let records = read_json(&out.join("ranking.json"));
    assert_eq!(records[0]["direction"], "higher_is_better");
}
