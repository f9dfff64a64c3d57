use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ComparisonTask, EvalError, ExperimentConfig, SignalSource};
use crate::models::ModelKind;
use crate::types::ClassLabel;

pub const REPORT_CSV_HEADER: &str = "task,window_s,source,model,mean_acc,ci_low,ci_high,seed_count";

/// Conventions behind the numbers, written into every summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub format: String,
    pub version: u32,
    pub mean_accuracy: String,
    pub confidence_interval: String,
    pub split: String,
    pub late_fusion: String,
    pub baseline_selection: String,
    pub baseline_guard_s: Option<f64>,
    pub master_seed: u64,
    pub n_seeds: usize,
    pub train_ratio: f64,
    pub k_folds: usize,
    pub n_boot: usize,
    pub alpha: f64,
}

impl ReportMetadata {
    pub fn for_config(cfg: &ExperimentConfig) -> Self {
        Self {
            format: "startle-surprise-report".into(),
            version: 1,
            mean_accuracy: "trace/sum of the confusion matrix pooled over all split seeds".into(),
            confidence_interval: format!(
                "percentile bootstrap over pooled per-test-sample correctness, {} resamples, alpha {}",
                cfg.n_boot, cfg.alpha
            ),
            split: format!(
                "stratified {}:{} sample-level split, n_test = max(1, round(ratio * n)) per class; {}-fold stratified grid search on train",
                (cfg.train_ratio * 100.0).round(),
                ((1.0 - cfg.train_ratio) * 100.0).round(),
                cfg.k_folds
            ),
            late_fusion: "majority vote of per-modality models, ties by summed normalized scores then lowest label".into(),
            baseline_selection: "baseline epochs limited to the largest event class, lowest participant ids first".into(),
            baseline_guard_s: None,
            master_seed: cfg.master_seed,
            n_seeds: cfg.n_seeds,
            train_ratio: cfg.train_ratio,
            k_folds: cfg.k_folds,
            n_boot: cfg.n_boot,
            alpha: cfg.alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub task: ComparisonTask,
    pub window_s: u32,
    pub source: SignalSource,
    pub model: ModelKind,
    pub classes: Vec<ClassLabel>,
    pub mean_accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Rows are true labels, columns predicted labels, both in `classes` order.
    pub confusion: Vec<Vec<u64>>,
    pub per_seed_accuracy: Vec<f64>,
    pub chosen_hyperparams: Vec<String>,
    pub seeds: Vec<u64>,
}

impl ReportCell {
    pub fn key(&self) -> String {
        format!("{}/{}/{}/{}", self.task, self.window_s, self.source, self.model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: ReportMetadata,
    pub cells: Vec<ReportCell>,
}

#[derive(Serialize)]
struct Summary<'a> {
    metadata: &'a ReportMetadata,
    cells: BTreeMap<String, &'a ReportCell>,
}

impl ExperimentReport {
    pub fn cell(
        &self,
        task: ComparisonTask,
        window_s: u32,
        source: SignalSource,
        model: ModelKind,
    ) -> Option<&ReportCell> {
        self.cells.iter().find(|c| {
            c.task == task && c.window_s == window_s && c.source == source && c.model == model
        })
    }

    /// One row per cell, accuracies with six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{:.6},{:.6},{:.6},{}",
                c.task,
                c.window_s,
                c.source,
                c.model,
                c.mean_accuracy,
                c.ci_low,
                c.ci_high,
                c.seeds.len()
            )
            .unwrap();
        }
        out
    }

    /// Pretty JSON with cells keyed by `task/window_s/source/model`.
    pub fn summary_json(&self) -> String {
        let summary = Summary {
            metadata: &self.metadata,
            cells: self.cells.iter().map(|c| (c.key(), c)).collect(),
        };
        serde_json::to_string_pretty(&summary).expect("report serializes")
    }
}

/// One parsed line of a report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub task: ComparisonTask,
    pub window_s: u32,
    pub source: SignalSource,
    pub model: ModelKind,
    pub mean_acc: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed_count: usize,
}

pub fn parse_report_csv(text: &str) -> Result<Vec<CsvRow>, EvalError> {
    let bad = |line: usize, what: &str| EvalError::InvalidConfig(format!("report line {line}: {what}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == REPORT_CSV_HEADER => {}
        _ => return Err(bad(1, "unexpected header")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 8 {
            return Err(bad(line_no, "expected 8 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line_no, s));
        rows.push(CsvRow {
            task: f[0].parse().map_err(|_| bad(line_no, f[0]))?,
            window_s: f[1].parse().map_err(|_| bad(line_no, f[1]))?,
            source: f[2].parse().map_err(|_| bad(line_no, f[2]))?,
            model: f[3].parse().map_err(|_| bad(line_no, f[3]))?,
            mean_acc: num(f[4])?,
            ci_low: num(f[5])?,
            ci_high: num(f[6])?,
            seed_count: f[7].parse().map_err(|_| bad(line_no, f[7]))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(task: ComparisonTask, acc: f64) -> ReportCell {
        ReportCell {
            task,
            window_s: 5,
            source: SignalSource::LateFusion,
            model: ModelKind::Gbt,
            classes: task.classes().to_vec(),
            mean_accuracy: acc,
            ci_low: acc - 0.1,
            ci_high: acc + 0.05,
            confusion: vec![],
            per_seed_accuracy: vec![acc],
            chosen_hyperparams: vec!["-".into()],
            seeds: vec![1, 2],
        }
    }

    #[test]
    fn csv_round_trips_through_the_parser() {
        let report = ExperimentReport {
            metadata: ReportMetadata::for_config(&ExperimentConfig::default()),
            cells: vec![cell(ComparisonTask::ThreeClass, 0.75), cell(ComparisonTask::StartleVsSurprise, 0.5)],
        };
        let csv = report.to_csv();
        assert!(csv.starts_with("task,window_s,source,model,mean_acc,ci_low,ci_high,seed_count\n"));
        assert!(csv.contains("three_class,5,late_fusion,gbt,0.750000,0.650000,0.800000,2\n"));
        let rows = parse_report_csv(&csv).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].task, ComparisonTask::ThreeClass);
        assert_eq!(rows[1].mean_acc, 0.5);
        assert!(parse_report_csv("nope\n").is_err());
    }

    #[test]
    fn summary_is_keyed_by_cell() {
        let report = ExperimentReport {
            metadata: ReportMetadata::for_config(&ExperimentConfig::default()),
            cells: vec![cell(ComparisonTask::ThreeClass, 0.75)],
        };
        let v: serde_json::Value = serde_json::from_str(&report.summary_json()).unwrap();
        assert_eq!(v["cells"]["three_class/5/late_fusion/gbt"]["mean_accuracy"], 0.75);
        assert_eq!(v["metadata"]["n_seeds"], 10);
    }
}
