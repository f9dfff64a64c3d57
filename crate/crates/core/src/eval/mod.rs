//! Fusion, data splitting, model selection, bootstrap intervals and the
//! experiment sweep that fills an [`ExperimentReport`].

mod bootstrap;
mod experiment;
mod fusion;
mod report;
mod search;
mod split;

pub use bootstrap::bootstrap_ci;
pub use experiment::{
    derive_seed, featurize, run_experiment, run_pipeline, shuffle_labels, ExperimentConfig,
    FitObserver, LabeledFeatures, NoopObserver, PipelineConfig, UnitKey,
};
pub use fusion::{early_fuse, late_fuse};
pub use report::{
    parse_report_csv, CsvRow, ExperimentReport, ReportCell, ReportMetadata, REPORT_CSV_HEADER,
};
pub use search::{cross_val_accuracy, grid_search, GridResult};
pub use split::{kfold, split_train_test};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::epoch::EpochError;
use crate::features::FeatureError;
use crate::models::ModelError;
use crate::types::{ChannelKind, ClassLabel};
use crate::dsp::DspError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no predictions to fuse")]
    EmptyEnsemble,
    #[error("voters disagree on the class set")]
    InconsistentClasses,
    #[error("modality {0} missing")]
    MissingModality(ChannelKind),
    #[error("class {label} has {count} samples, need at least {min}")]
    ClassTooSmall {
        label: ClassLabel,
        count: usize,
        min: usize,
    },
    #[error("class {label} has {count} samples, fewer than k = {k}")]
    ClassSmallerThanK {
        label: ClassLabel,
        count: usize,
        k: usize,
    },
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("empty correctness vector")]
    EmptyVector,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Epoch(#[from] EpochError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error("task {task}, window {window_s} s: {source}")]
    Cell {
        task: ComparisonTask,
        window_s: u32,
        #[source]
        source: Box<EvalError>,
    },
}

/// Which classes are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComparisonTask {
    StartleVsSurprise,
    StartleVsBaseline,
    SurpriseVsBaseline,
    ThreeClass,
}

impl ComparisonTask {
    pub const ALL: [ComparisonTask; 4] = [
        ComparisonTask::StartleVsSurprise,
        ComparisonTask::StartleVsBaseline,
        ComparisonTask::SurpriseVsBaseline,
        ComparisonTask::ThreeClass,
    ];

    pub fn classes(self) -> &'static [ClassLabel] {
        use ClassLabel::*;
        match self {
            ComparisonTask::StartleVsSurprise => &[Startle, Surprise],
            ComparisonTask::StartleVsBaseline => &[Startle, Baseline],
            ComparisonTask::SurpriseVsBaseline => &[Surprise, Baseline],
            ComparisonTask::ThreeClass => &[Startle, Surprise, Baseline],
        }
    }

    /// Accuracy of uniform guessing: 1/2 or 1/3.
    pub fn chance_level(self) -> f64 {
        1.0 / self.classes().len() as f64
    }

    pub fn name(self) -> &'static str {
        match self {
            ComparisonTask::StartleVsSurprise => "startle_vs_surprise",
            ComparisonTask::StartleVsBaseline => "startle_vs_baseline",
            ComparisonTask::SurpriseVsBaseline => "surprise_vs_baseline",
            ComparisonTask::ThreeClass => "three_class",
        }
    }
}

impl fmt::Display for ComparisonTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComparisonTask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ComparisonTask::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| s.to_string())
    }
}

/// What a classifier sees: one modality, all four concatenated, or one
/// classifier per modality combined by vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SignalSource {
    Ecg,
    Eda,
    Ppg,
    Resp,
    EarlyFusion,
    LateFusion,
}

impl SignalSource {
    pub const ALL: [SignalSource; 6] = [
        SignalSource::Ecg,
        SignalSource::Eda,
        SignalSource::Ppg,
        SignalSource::Resp,
        SignalSource::EarlyFusion,
        SignalSource::LateFusion,
    ];

    pub const MODALITIES: [SignalSource; 4] = [
        SignalSource::Ecg,
        SignalSource::Eda,
        SignalSource::Ppg,
        SignalSource::Resp,
    ];

    pub fn channel(self) -> Option<ChannelKind> {
        match self {
            SignalSource::Ecg => Some(ChannelKind::Ecg),
            SignalSource::Eda => Some(ChannelKind::Eda),
            SignalSource::Ppg => Some(ChannelKind::Ppg),
            SignalSource::Resp => Some(ChannelKind::Resp),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignalSource::Ecg => "ecg",
            SignalSource::Eda => "eda",
            SignalSource::Ppg => "ppg",
            SignalSource::Resp => "resp",
            SignalSource::EarlyFusion => "early_fusion",
            SignalSource::LateFusion => "late_fusion",
        }
    }
}

impl fmt::Display for SignalSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignalSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SignalSource::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| s.to_string())
    }
}
