//! Report serialisation: JSON, CSV tables and a bar-chart SVG.

use std::fmt::Write as _;
use std::path::Path;

use super::experiment::{ExperimentReport, Metric};
use crate::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn report_to_json(report: &ExperimentReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn write_report_json(path: impl AsRef<Path>, report: &ExperimentReport) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report_to_json(report)?).map_err(io_err(path))
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<ExperimentReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

fn percent_label(p: f64) -> String {
    format!("{p}")
}

/// Method x scenario table of Wilcoxon outcomes against the reference:
/// `=` similar, `↑` the method is better, `↓` the reference is better.
pub fn wilcoxon_table_csv(report: &ExperimentReport, metric: Metric) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["method".to_owned()];
    header.extend(report.config.percents.iter().map(|&p| percent_label(p)));
    writer.write_record(&header)?;
    for method in &report.methods {
        if Some(method) == report.reference.as_ref() {
            continue;
        }
        let mut row = vec![method.clone()];
        for &p in &report.config.percents {
            row.push(
                report
                    .comparison(method, p, metric)
                    .map_or("", |c| c.result.decision.symbol())
                    .to_owned(),
            );
        }
        writer.write_record(&row)?;
    }
    finish(writer)
}

/// One row per (method, percent) with mean and standard deviation.
pub fn metrics_table_csv(report: &ExperimentReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "method",
        "percent",
        "features_kept",
        "f1_mean",
        "f1_std",
        "accuracy_mean",
        "accuracy_std",
    ])?;
    for cell in &report.cells {
        writer.write_record([
            cell.method.clone(),
            percent_label(cell.percent),
            cell.features_kept.to_string(),
            cell.f1.mean.to_string(),
            cell.f1.std.to_string(),
            cell.accuracy.mean.to_string(),
            cell.accuracy.std.to_string(),
        ])?;
    }
    finish(writer)
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidParameter(format!("CSV buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidParameter(format!("CSV buffer: {e}")))
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd", "#ff7f0e"];

/// Grouped bars of the mean metric (percent) per scenario and method, with
/// one-standard-deviation error bars.
pub fn render_svg(report: &ExperimentReport, metric: Metric) -> String {
    let percents = &report.config.percents;
    let methods = &report.methods;
    let (width, height) = (80.0 + 70.0 * percents.len() as f64, 360.0);
    let (left, top, bottom) = (60.0, 40.0, 300.0);
    let group = 70.0;
    let bar = (group - 14.0) / methods.len().max(1) as f64;

    let value = |method: &str, p: f64| {
        report.cell(method, p).map(|c| match metric {
            Metric::F1 => (c.f1.mean, c.f1.std),
            Metric::Accuracy => (c.accuracy.mean, c.accuracy.std),
        })
    };
    let lows = methods
        .iter()
        .flat_map(|m| percents.iter().filter_map(move |&p| value(m, p)))
        .map(|(mean, std)| mean - std);
    let floor = (lows.fold(1.0f64, f64::min) * 10.0).floor() / 10.0;
    let floor = floor.clamp(0.0, 0.9);
    let y = |v: f64| bottom - (v.clamp(floor, 1.0) - floor) / (1.0 - floor) * (bottom - top);

    let label = match metric {
        Metric::F1 => "F1-score (%)",
        Metric::Accuracy => "Accuracy (%)",
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{label} by % of selected features</text>"#,
        width / 2.0
    );
    for tick in 0..=5 {
        let v = floor + (1.0 - floor) * tick as f64 / 5.0;
        let ty = y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{:.1}</text>"##,
            width - 10.0,
            left - 4.0,
            ty + 4.0,
            v * 100.0
        );
    }
    for (g, &p) in percents.iter().enumerate() {
        let gx = left + 7.0 + group * g as f64;
        for (m, method) in methods.iter().enumerate() {
            let Some((mean, std)) = value(method, p) else { continue };
            let x = gx + bar * m as f64;
            let colour = PALETTE[m % PALETTE.len()];
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{colour}"><title>{method} {p}%: {:.2} ± {:.2}</title></rect>"#,
                y(mean),
                bar - 1.0,
                bottom - y(mean),
                mean * 100.0,
                std * 100.0
            );
            let cx = x + (bar - 1.0) / 2.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
                y(mean + std),
                y(mean - std)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{p}</text>"#,
            gx + (group - 14.0) / 2.0,
            bottom + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{bottom}" x2="{:.2}" y2="{bottom}" stroke="black"/>"#,
        width - 10.0
    );
    for (m, method) in methods.iter().enumerate() {
        let lx = left + 110.0 * m as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{method}</text>"#,
            bottom + 30.0,
            PALETTE[m % PALETTE.len()],
            lx + 14.0,
            bottom + 39.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `report.json`, the Wilcoxon tables, the metrics table and,
/// optionally, F1 and accuracy charts into `dir`. Returns the written paths.
pub fn write_report_files(
    dir: impl AsRef<Path>,
    report: &ExperimentReport,
    svg: bool,
) -> Result<Vec<std::path::PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut outputs = vec![
        (dir.join("report.json"), report_to_json(report)?),
        (dir.join("wilcoxon_f1.csv"), wilcoxon_table_csv(report, Metric::F1)?),
        (
            dir.join("wilcoxon_accuracy.csv"),
            wilcoxon_table_csv(report, Metric::Accuracy)?,
        ),
        (dir.join("metrics.csv"), metrics_table_csv(report)?),
    ];
    if svg {
        outputs.push((dir.join("f1.svg"), render_svg(report, Metric::F1)));
        outputs.push((dir.join("accuracy.svg"), render_svg(report, Metric::Accuracy)));
    }
    for (path, text) in &outputs {
        std::fs::write(path, text).map_err(io_err(path))?;
    }
    Ok(outputs.into_iter().map(|(p, _)| p).collect())
}
