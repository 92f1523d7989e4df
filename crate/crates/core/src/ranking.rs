//! Feature rankings shared by every selector, plus their JSON/CSV export.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerIsBetter,
    HigherIsBetter,
}

/// One score per feature, together with how to read it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    pub direction: Direction,
    /// Features whose statistic is degenerate (e.g. zero variance inside
    /// every class for ANOVA). Their score is a sentinel.
    pub degenerate: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub index: usize,
    pub score: f64,
    pub constant: bool,
}

/// Feature indices ordered best-first.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub entries: Vec<RankEntry>,
    pub direction: Direction,
}

impl FeatureRanking {
    /// Orders features best-first according to `direction`, breaking score
    /// ties by the lower index. Constant features go last, in index order.
    pub fn from_scores(scores: &[f64], direction: Direction, constant: &[bool]) -> Self {
        let mut entries: Vec<RankEntry> = scores
            .iter()
            .enumerate()
            .map(|(index, &score)| RankEntry {
                index,
                score,
                constant: constant.get(index).copied().unwrap_or(false),
            })
            .collect();
        entries.sort_by(|a, b| {
            a.constant
                .cmp(&b.constant)
                .then_with(|| {
                    if a.constant {
                        std::cmp::Ordering::Equal
                    } else {
                        match direction {
                            Direction::LowerIsBetter => a.score.total_cmp(&b.score),
                            Direction::HigherIsBetter => b.score.total_cmp(&a.score),
                        }
                    }
                })
                .then_with(|| a.index.cmp(&b.index))
        });
        Self { entries, direction }
    }

    /// Ranking that keeps the features in their original order; used when
    /// no selection is applied.
    pub fn identity(n_features: usize) -> Self {
        Self {
            entries: (0..n_features)
                .map(|index| RankEntry {
                    index,
                    score: 0.0,
                    constant: false,
                })
                .collect(),
            direction: Direction::LowerIsBetter,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.index).collect()
    }
}

/// Number of features kept when retaining `percent` of `n`.
pub fn retained_count(n: usize, percent: f64) -> Result<usize> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::InvalidParameter(format!(
            "percent must lie in (0, 100], got {percent}"
        )));
    }
    // tolerance absorbs representation error in e.g. 10 * 70 / 100
    let exact = n as f64 * percent / 100.0;
    Ok(((exact - 1e-9).ceil() as usize).clamp(1.min(n), n))
}

/// First `ceil(n * percent / 100)` features of the ranking, best first.
pub fn select_top(ranking: &FeatureRanking, percent: f64) -> Result<Vec<usize>> {
    let keep = retained_count(ranking.len(), percent)?;
    Ok(ranking.entries[..keep].iter().map(|e| e.index).collect())
}

/// Row of the exported ranking file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRecord {
    pub index: usize,
    pub name: String,
    pub score: f64,
    pub constant: bool,
    pub direction: Direction,
}

pub fn ranking_records(ranking: &FeatureRanking, data: &LabeledDataset) -> Vec<RankingRecord> {
    ranking
        .entries
        .iter()
        .map(|e| RankingRecord {
            index: e.index,
            name: data.feature_names()[e.index].clone(),
            score: e.score,
            constant: e.constant,
            direction: ranking.direction,
        })
        .collect()
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_ranking_json(path: impl AsRef<Path>, records: &[RankingRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, records)?;
    writeln!(file).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_ranking_json(path: impl AsRef<Path>) -> Result<Vec<RankingRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_ranking_csv(path: impl AsRef<Path>, records: &[RankingRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(path.as_ref())?);
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.as_ref().display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_follows_direction_and_ties() {
        let r = FeatureRanking::from_scores(&[0.3, 0.1, 0.3, 0.0], Direction::LowerIsBetter, &[
            false, false, false, true,
        ]);
        assert_eq!(r.indices(), vec![1, 0, 2, 3]);
        let r = FeatureRanking::from_scores(&[0.3, 0.1, 0.3], Direction::HigherIsBetter, &[]);
        assert_eq!(r.indices(), vec![0, 2, 1]);
    }

    #[test]
    fn retained_count_examples() {
        assert_eq!(retained_count(20, 45.0).unwrap(), 9);
        assert_eq!(retained_count(20, 100.0).unwrap(), 20);
        assert_eq!(retained_count(10, 70.0).unwrap(), 7);
        assert_eq!(retained_count(42, 10.0).unwrap(), 5);
        assert_eq!(retained_count(3, 1.0).unwrap(), 1);
        assert!(retained_count(20, 0.0).is_err());
        assert!(retained_count(20, 100.5).is_err());
        assert!(retained_count(20, f64::NAN).is_err());
    }

    #[test]
    fn select_top_keeps_rank_order() {
        let scores: Vec<f64> = (0..20).map(|i| (19 - i) as f64).collect();
        let r = FeatureRanking::from_scores(&scores, Direction::LowerIsBetter, &[]);
        assert_eq!(select_top(&r, 45.0).unwrap(), (11..20).rev().collect::<Vec<_>>());
        assert_eq!(select_top(&r, 100.0).unwrap(), r.indices());
        assert!(select_top(&r, 0.0).is_err());
    }

    #[test]
    fn export_round_trip() {
        let d = LabeledDataset::new(
            vec![vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![1, 2],
            vec!["a".into(), "b".into()],
            2,
        )
        .unwrap();
        let r = FeatureRanking::from_scores(&[0.2, 0.5], Direction::LowerIsBetter, &[false, true]);
        let records = ranking_records(&r, &d);
        let dir = tempfile::tempdir().unwrap();
        let json = dir.path().join("r.json");
        write_ranking_json(&json, &records).unwrap();
        assert_eq!(read_ranking_json(&json).unwrap(), records);
        let csv_path = dir.path().join("r.csv");
        write_ranking_csv(&csv_path, &records).unwrap();
        let text = std::fs::read_to_string(csv_path).unwrap();
        assert_eq!(
            text,
            "index,name,score,constant,direction\n0,a,0.2,false,lower_is_better\n1,b,0.5,true,lower_is_better\n"
        );
    }
}
