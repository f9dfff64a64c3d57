//! Classifiers: Gaussian naive Bayes, an SMO-trained kernel SVM and
//! gradient-boosted trees, plus the shared prediction type, hyperparameter
//! grids and model persistence.

pub mod gbt;
pub mod gnb;
pub mod standardize;
pub mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gbt::{predict_gbt, train_gbt, GbtModel, GbtParams};
pub use gnb::{predict_gnb, train_gnb, GnbModel};
pub use standardize::{apply_standardizer, fit_standardizer, Standardizer};
pub use svm::{
    dual_objective, kernel_matrix, predict_svm, solve_smo, train_svm, train_svm_multiclass, Kernel,
    SmoSolution, SvmModel, SvmParams,
};

use crate::types::ClassLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("empty feature matrix")]
    EmptyMatrix,
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("row {row} has the wrong number of features (expected {expected})")]
    DimensionMismatch { row: usize, expected: usize },
    #[error("{x} feature rows but {y} labels")]
    LengthMismatch { x: usize, y: usize },
    #[error("no training samples for class {0}")]
    ClassAbsent(ClassLabel),
    #[error("label {0} is not one of the model's classes")]
    UnknownLabel(ClassLabel),
    #[error("a binary problem needs samples of both classes")]
    SingleClass,
    #[error("box constraint C must be positive, got {0}")]
    NonPositiveC(f64),
    #[error("all training labels are identical")]
    DegenerateLabels,
    #[error("invalid hyperparameters: {0}")]
    InvalidParams(String),
    #[error("model artifact: {0}")]
    Artifact(String),
}

/// Validates a training set against the classes the model must cover and
/// returns the feature dimension.
pub(crate) fn check_training_set(
    x: &[Vec<f64>],
    y: &[ClassLabel],
    classes: &[ClassLabel],
) -> Result<usize, ModelError> {
    if x.is_empty() || x[0].is_empty() {
        return Err(ModelError::EmptyMatrix);
    }
    if x.len() != y.len() {
        return Err(ModelError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let d = x[0].len();
    if let Some(row) = x.iter().position(|r| r.len() != d) {
        return Err(ModelError::DimensionMismatch { row, expected: d });
    }
    if let Some(l) = y.iter().find(|l| !classes.contains(l)) {
        return Err(ModelError::UnknownLabel(*l));
    }
    if let Some(c) = classes.iter().find(|c| !y.contains(c)) {
        return Err(ModelError::ClassAbsent(*c));
    }
    Ok(d)
}

/// A predicted label with one normalized score per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: ClassLabel,
    pub scores: Vec<(ClassLabel, f64)>,
}

impl Prediction {
    /// Argmax of `scores`; exact ties go to the lower label.
    pub fn from_scores(classes: &[ClassLabel], scores: Vec<f64>) -> Self {
        let mut best = 0;
        for i in 1..classes.len() {
            if scores[i] > scores[best] || (scores[i] == scores[best] && classes[i] < classes[best]) {
                best = i;
            }
        }
        Prediction {
            label: classes[best],
            scores: classes.iter().copied().zip(scores).collect(),
        }
    }

    pub fn score(&self, label: ClassLabel) -> Option<f64> {
        self.scores.iter().find(|(l, _)| *l == label).map(|(_, s)| *s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Svm,
    NaiveBayes,
    Gbt,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Svm, ModelKind::NaiveBayes, ModelKind::Gbt];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Svm => "svm",
            ModelKind::NaiveBayes => "naive_bayes",
            ModelKind::Gbt => "gbt",
        }
    }

    /// Default ordered search grid.
    pub fn default_grid(self) -> Vec<Hyperparams> {
        match self {
            ModelKind::Svm => GridSpec::default().svm_grid(),
            ModelKind::NaiveBayes => vec![Hyperparams::NaiveBayes],
            ModelKind::Gbt => GridSpec::default().gbt_grid(),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "svm" => Ok(ModelKind::Svm),
            "naive_bayes" | "nb" | "gnb" => Ok(ModelKind::NaiveBayes),
            "gbt" | "xgboost" => Ok(ModelKind::Gbt),
            other => Err(other.to_string()),
        }
    }
}

/// Value lists spanned by the hyperparameter grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub svm_c: Vec<f64>,
    pub svm_linear: bool,
    pub svm_gamma: Vec<f64>,
    pub gbt_rounds: Vec<usize>,
    pub gbt_eta: Vec<f64>,
    pub gbt_depth: Vec<usize>,
    pub gbt_lambda: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            svm_c: vec![0.1, 1.0, 10.0, 100.0],
            svm_linear: true,
            svm_gamma: vec![0.01, 0.1, 1.0],
            gbt_rounds: vec![25, 50, 100],
            gbt_eta: vec![0.1, 0.3],
            gbt_depth: vec![2, 3],
            gbt_lambda: vec![1.0],
        }
    }
}

impl GridSpec {
    /// For each C: linear first (if enabled), then rbf per gamma.
    pub fn svm_grid(&self) -> Vec<Hyperparams> {
        let mut out = Vec::new();
        for &c in &self.svm_c {
            if self.svm_linear {
                out.push(Hyperparams::Svm(SvmParams::new(c, Kernel::Linear)));
            }
            for &gamma in &self.svm_gamma {
                out.push(Hyperparams::Svm(SvmParams::new(c, Kernel::Rbf { gamma })));
            }
        }
        out
    }

    pub fn gbt_grid(&self) -> Vec<Hyperparams> {
        let mut out = Vec::new();
        for &n_rounds in &self.gbt_rounds {
            for &eta in &self.gbt_eta {
                for &max_depth in &self.gbt_depth {
                    for &lambda in &self.gbt_lambda {
                        out.push(Hyperparams::Gbt(GbtParams {
                            n_rounds,
                            eta,
                            max_depth,
                            lambda,
                            ..GbtParams::default()
                        }));
                    }
                }
            }
        }
        out
    }

    pub fn grid(&self, kind: ModelKind) -> Vec<Hyperparams> {
        match kind {
            ModelKind::Svm => self.svm_grid(),
            ModelKind::NaiveBayes => vec![Hyperparams::NaiveBayes],
            ModelKind::Gbt => self.gbt_grid(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Hyperparams {
    Svm(SvmParams),
    NaiveBayes,
    Gbt(GbtParams),
}

impl Hyperparams {
    pub fn kind(&self) -> ModelKind {
        match self {
            Hyperparams::Svm(_) => ModelKind::Svm,
            Hyperparams::NaiveBayes => ModelKind::NaiveBayes,
            Hyperparams::Gbt(_) => ModelKind::Gbt,
        }
    }
}

impl fmt::Display for Hyperparams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyperparams::Svm(p) => match p.kernel {
                Kernel::Linear => write!(f, "C={} kernel=linear", p.c),
                Kernel::Rbf { gamma } => write!(f, "C={} kernel=rbf gamma={}", p.c, gamma),
            },
            Hyperparams::NaiveBayes => f.write_str("-"),
            Hyperparams::Gbt(p) => write!(
                f,
                "rounds={} eta={} depth={} lambda={}",
                p.n_rounds, p.eta, p.max_depth, p.lambda
            ),
        }
    }
}

/// A fitted model together with any preprocessing it owns. SVM and naive
/// Bayes standardize their inputs; trees consume raw features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrainedModel {
    Svm {
        scaler: Standardizer,
        model: SvmModel,
    },
    NaiveBayes {
        scaler: Standardizer,
        model: GnbModel,
    },
    Gbt {
        model: GbtModel,
    },
}

impl TrainedModel {
    pub fn fit(
        params: &Hyperparams,
        x: &[Vec<f64>],
        y: &[ClassLabel],
        classes: &[ClassLabel],
    ) -> Result<Self, ModelError> {
        Ok(match params {
            Hyperparams::Svm(p) => {
                let scaler = fit_standardizer(x)?;
                let model = train_svm_multiclass(&scaler.transform(x), y, classes, p)?;
                TrainedModel::Svm { scaler, model }
            }
            Hyperparams::NaiveBayes => {
                let scaler = fit_standardizer(x)?;
                let model = train_gnb(&scaler.transform(x), y, classes)?;
                TrainedModel::NaiveBayes { scaler, model }
            }
            Hyperparams::Gbt(p) => TrainedModel::Gbt {
                model: train_gbt(x, y, classes, p)?,
            },
        })
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        match self {
            TrainedModel::Svm { scaler, model } => model.predict(&scaler.transform_row(x)),
            TrainedModel::NaiveBayes { scaler, model } => model.predict(&scaler.transform_row(x)),
            TrainedModel::Gbt { model } => model.predict(x),
        }
    }
}

pub const ARTIFACT_FORMAT: &str = "startle-surprise-model";
pub const ARTIFACT_VERSION: u32 = 1;

/// Versioned, self-describing JSON container for a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format: String,
    pub version: u32,
    pub hyperparams: Hyperparams,
    pub model: TrainedModel,
}

impl ModelArtifact {
    pub fn new(hyperparams: Hyperparams, model: TrainedModel) -> Self {
        Self {
            format: ARTIFACT_FORMAT.to_string(),
            version: ARTIFACT_VERSION,
            hyperparams,
            model,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model artifacts always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let a: ModelArtifact =
            serde_json::from_str(text).map_err(|e| ModelError::Artifact(e.to_string()))?;
        if a.format != ARTIFACT_FORMAT {
            return Err(ModelError::Artifact(format!("unknown format `{}`", a.format)));
        }
        if a.version != ARTIFACT_VERSION {
            return Err(ModelError::Artifact(format!("unsupported version {}", a.version)));
        }
        Ok(a)
    }
}
