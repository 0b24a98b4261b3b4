//! Report structures shared by all studies, their CSV projection, and
//! cross-report aggregation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot aggregate reports from different studies ({0} vs {1})")]
    MixedStudies(String, String),
    #[error("no reports to aggregate")]
    Empty,
}

/// Mean/std summary of one metric over runs (sample standard deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub per_run: Vec<f64>,
}

pub fn summarize(values: &[f64]) -> MetricSummary {
    let n = values.len();
    let mean = if n == 0 { 0.0 } else { values.iter().sum::<f64>() / n as f64 };
    let std = if n < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    MetricSummary {
        mean,
        std,
        n,
        per_run: values.to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub metrics: BTreeMap<String, MetricSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub study: String,
    pub dataset_dir: Option<String>,
    pub runs: usize,
    pub seeds: Vec<u64>,
    pub conditions: Vec<ConditionReport>,
    /// Run labels excluded because an episode aborted.
    pub flagged_runs: Vec<String>,
    /// Study-specific tables (selection rates, payment shares, ...).
    pub extra: serde_json::Value,
}

impl ExperimentReport {
    pub fn new(study: &str, runs: usize, seeds: Vec<u64>) -> Self {
        ExperimentReport {
            schema_version: agora_core::dataset::SCHEMA_VERSION,
            study: study.to_string(),
            dataset_dir: None,
            runs,
            seeds,
            conditions: Vec::new(),
            flagged_runs: Vec::new(),
            extra: serde_json::Value::Null,
        }
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.condition == name)
    }

    pub fn metric(&self, condition: &str, metric: &str) -> Option<&MetricSummary> {
        self.condition(condition)?.metrics.get(metric)
    }

    pub fn save_json(&self, path: &Path) -> Result<(), ReportError> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        bytes.push(b'\n');
        std::fs::write(path, bytes).map_err(|e| ReportError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load_json(path: &Path) -> Result<Self, ReportError> {
        let bytes = std::fs::read(path).map_err(|e| ReportError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::from_slice(&bytes).map_err(|e| ReportError::Io {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })
    }
}

/// One plot-ready CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub condition: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

pub fn summary_rows(report: &ExperimentReport) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for condition in &report.conditions {
        for (metric, summary) in &condition.metrics {
            rows.push(SummaryRow {
                condition: condition.condition.clone(),
                metric: metric.clone(),
                mean: summary.mean,
                std: summary.std,
                n: summary.n,
            });
        }
    }
    rows
}

pub fn write_csv(rows: &[SummaryRow], path: &Path) -> Result<(), ReportError> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| ReportError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<SummaryRow>, ReportError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Merge same-study reports into one summary: per (condition, metric) the
/// per-run samples are concatenated and re-summarized. Reports from
/// different studies are rejected.
pub fn aggregate(reports: &[ExperimentReport]) -> Result<ExperimentReport, ReportError> {
    let first = reports.first().ok_or(ReportError::Empty)?;
    for report in reports {
        if report.study != first.study {
            return Err(ReportError::MixedStudies(
                first.study.clone(),
                report.study.clone(),
            ));
        }
    }

    let mut merged: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for report in reports {
        for condition in &report.conditions {
            let per_condition = merged.entry(condition.condition.clone()).or_default();
            for (metric, summary) in &condition.metrics {
                per_condition
                    .entry(metric.clone())
                    .or_default()
                    .extend(summary.per_run.iter().copied());
            }
        }
    }

    let mut out = ExperimentReport::new(
        &first.study,
        reports.iter().map(|r| r.runs).sum(),
        reports.iter().flat_map(|r| r.seeds.iter().copied()).collect(),
    );
    out.flagged_runs = reports
        .iter()
        .flat_map(|r| r.flagged_runs.iter().cloned())
        .collect();
    out.conditions = merged
        .into_iter()
        .map(|(condition, metrics)| ConditionReport {
            condition,
            metrics: metrics
                .into_iter()
                .map(|(name, values)| (name, summarize(&values)))
                .collect(),
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report_with(study: &str, condition: &str, values: &[f64]) -> ExperimentReport {
        let mut report = ExperimentReport::new(study, values.len(), vec![1]);
        report.conditions.push(ConditionReport {
            condition: condition.into(),
            metrics: BTreeMap::from([("welfare_cents".to_string(), summarize(values))]),
        });
        report
    }

    #[test]
    fn summarize_handles_constants_and_spread() {
        let constant = summarize(&[10.0, 10.0, 10.0, 10.0, 10.0]);
        assert_eq!(constant.mean, 10.0);
        assert_eq!(constant.std, 0.0);
        assert_eq!(constant.n, 5);

        let spread = summarize(&[1.0, 3.0]);
        assert_eq!(spread.mean, 2.0);
        assert!((spread.std - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn aggregate_concatenates_runs_and_rejects_mixed_studies() {
        let a = report_with("welfare", "optimal", &[10.0, 12.0]);
        let b = report_with("welfare", "optimal", &[14.0]);
        let merged = aggregate(&[a.clone(), b]).unwrap();
        let summary = merged.metric("optimal", "welfare_cents").unwrap();
        assert_eq!(summary.n, 3);
        assert_eq!(summary.mean, 12.0);

        let alien = report_with("bias", "optimal", &[1.0]);
        assert!(matches!(
            aggregate(&[a, alien]),
            Err(ReportError::MixedStudies(_, _))
        ));
    }

    #[test]
    fn csv_round_trips_exactly() {
        let report = report_with("welfare", "optimal", &[10.0, 12.0, 14.0]);
        let rows = summary_rows(&report);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        write_csv(&rows, &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), rows);
    }
}
