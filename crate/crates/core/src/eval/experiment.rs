use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, ReportCell, ReportMetadata};
use super::search::grid_search_observed;
use super::{bootstrap_ci, early_fuse, late_fuse, split_train_test, ComparisonTask, EvalError, SignalSource};
use crate::dsp::{preprocess_recording, PreprocessConfig};
use crate::epoch::{balance_baseline, build_dataset, DatasetEntry, EpochingConfig, DEFAULT_BASELINE_GUARD_S};
use crate::features::extract_features;
use crate::models::{GridSpec, ModelKind, Prediction, TrainedModel};
use crate::types::{ChannelKind, ClassLabel, FeatureVector, RawRecording, Window};

/// One epoch reduced to its early-fused feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledFeatures {
    pub participant_id: String,
    pub label: ClassLabel,
    pub features: FeatureVector,
}

/// Per-modality features for every epoch, concatenated in channel order.
pub fn featurize(entries: &[DatasetEntry]) -> Result<Vec<LabeledFeatures>, EvalError> {
    entries
        .iter()
        .map(|e| {
            let parts = ChannelKind::ALL
                .iter()
                .map(|k| extract_features(&e.epoch, &[*k]))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(LabeledFeatures {
                participant_id: e.participant_id.clone(),
                label: e.label(),
                features: early_fuse(&parts)?,
            })
        })
        .collect()
}

/// Returns a copy of `data` with its labels permuted by `seed`.
pub fn shuffle_labels(data: &[LabeledFeatures], seed: u64) -> Vec<LabeledFeatures> {
    let mut labels: Vec<ClassLabel> = data.iter().map(|d| d.label).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    data.iter()
        .zip(labels)
        .map(|(d, label)| LabeledFeatures { label, ..d.clone() })
        .collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a key into an independent stream seed.
pub fn derive_seed(master: u64, key: &[u64]) -> u64 {
    key.iter()
        .fold(splitmix64(master), |h, &k| splitmix64(h ^ splitmix64(k)))
}

const SPLIT_STREAM: u64 = 1;
const CV_STREAM: u64 = 2;
const BOOT_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub windows: Vec<Window>,
    pub tasks: Vec<ComparisonTask>,
    pub models: Vec<ModelKind>,
    /// Number of repeated 80:20 splits averaged into each cell.
    pub n_seeds: usize,
    pub master_seed: u64,
    pub train_ratio: f64,
    pub k_folds: usize,
    pub n_boot: usize,
    pub alpha: f64,
    pub grid: GridSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            windows: Window::ALL.to_vec(),
            tasks: ComparisonTask::ALL.to_vec(),
            models: vec![ModelKind::Svm, ModelKind::NaiveBayes, ModelKind::Gbt],
            n_seeds: 10,
            master_seed: 0,
            train_ratio: 0.8,
            k_folds: 5,
            n_boot: 10_000,
            alpha: 0.05,
            grid: GridSpec::default(),
        }
    }
}

/// Everything needed to go from raw recordings to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub preprocess: PreprocessConfig,
    pub baseline_guard_s: f64,
    pub experiment: ExperimentConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            preprocess: PreprocessConfig::default(),
            baseline_guard_s: DEFAULT_BASELINE_GUARD_S,
            experiment: ExperimentConfig::default(),
        }
    }
}

/// Identifies one repeated split of one (task, window, model) combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitKey {
    pub task: ComparisonTask,
    pub window: Window,
    pub model: ModelKind,
    pub repeat: usize,
}

/// Hook into every split and model fit made by [`run_experiment`]. Row
/// indices refer to the per-window dataset passed in.
pub trait FitObserver: Sync {
    fn on_split(&self, _key: &UnitKey, _train: &[usize], _test: &[usize]) {}
    fn on_fit(&self, _key: &UnitKey, _source: SignalSource, _rows: &[usize]) {}
}

pub struct NoopObserver;

impl FitObserver for NoopObserver {}

/// Preprocesses, epochs, balances and featurizes the recordings for every
/// configured window, then runs the experiment.
pub fn run_pipeline(
    recordings: &[RawRecording],
    cfg: &PipelineConfig,
) -> Result<ExperimentReport, EvalError> {
    let epoching = cfg
        .experiment
        .windows
        .iter()
        .map(|&w| EpochingConfig::new(w, cfg.baseline_guard_s))
        .collect::<Result<Vec<_>, _>>()?;
    // Each recording is filtered and cut right away so that only epochs are
    // kept in memory.
    let per_recording = recordings
        .par_iter()
        .map(|r| {
            let clean = preprocess_recording(r, &cfg.preprocess)?;
            epoching
                .iter()
                .map(|e| Ok(build_dataset(std::slice::from_ref(&clean), e)?))
                .collect::<Result<Vec<_>, EvalError>>()
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let mut data = BTreeMap::new();
    for (w, e) in epoching.iter().enumerate() {
        let mut entries: Vec<DatasetEntry> =
            per_recording.iter().flat_map(|r| r[w].iter().cloned()).collect();
        entries.sort_by(|a, b| a.participant_id.cmp(&b.participant_id));
        data.insert(e.window, featurize(&balance_baseline(entries))?);
    }
    let mut report = run_experiment(&data, &cfg.experiment, &NoopObserver)?;
    report.metadata.baseline_guard_s = Some(cfg.baseline_guard_s);
    Ok(report)
}

struct UnitResult {
    test_labels: Vec<ClassLabel>,
    split_seed: u64,
    /// Predicted labels and chosen hyperparameters per source, in
    /// `SignalSource::ALL` order.
    sources: Vec<(Vec<ClassLabel>, String)>,
}

fn columns(layout_source: &FeatureVector, source: SignalSource) -> Vec<usize> {
    let layout = layout_source.layout();
    (0..layout.len())
        .filter(|&j| source.channel().is_none_or(|k| layout[j].channel == k))
        .collect()
}

fn run_unit(
    key: UnitKey,
    rows: &[usize],
    data: &[LabeledFeatures],
    cfg: &ExperimentConfig,
    observer: &dyn FitObserver,
) -> Result<UnitResult, EvalError> {
    let classes = key.task.classes();
    let task_id = key.task as u64;
    let window_id = key.window.whole_seconds() as u64;
    let model_id = key.model as u64;
    let repeat = key.repeat as u64;

    let labels: Vec<ClassLabel> = rows.iter().map(|&i| data[i].label).collect();
    let split_seed = derive_seed(cfg.master_seed, &[SPLIT_STREAM, task_id, window_id, repeat]);
    let (train_local, test_local) = split_train_test(&labels, cfg.train_ratio, split_seed)?;
    let train: Vec<usize> = train_local.iter().map(|&i| rows[i]).collect();
    let test: Vec<usize> = test_local.iter().map(|&i| rows[i]).collect();
    observer.on_split(&key, &train, &test);

    let y_train: Vec<ClassLabel> = train.iter().map(|&i| data[i].label).collect();
    let grid = cfg.grid.grid(key.model);
    let mut predictions: Vec<Vec<Prediction>> = Vec::new();
    let mut sources = Vec::new();
    for source in SignalSource::ALL {
        if source == SignalSource::LateFusion {
            let voters = &predictions[..SignalSource::MODALITIES.len()];
            let fused = (0..test.len())
                .map(|t| late_fuse(&voters.iter().map(|v| v[t].clone()).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>, _>>()?;
            let chosen = SignalSource::MODALITIES
                .iter()
                .zip(&sources)
                .map(|(s, (_, p)): (&SignalSource, &(Vec<ClassLabel>, String))| format!("{s}: {p}"))
                .collect::<Vec<_>>()
                .join("; ");
            sources.push((fused, chosen));
            continue;
        }
        let cols = columns(&data[rows[0]].features, source);
        let project = |i: usize| -> Vec<f64> {
            let v = data[i].features.values();
            cols.iter().map(|&j| v[j]).collect()
        };
        let x_train: Vec<Vec<f64>> = train.iter().map(|&i| project(i)).collect();
        let cv_seed = derive_seed(
            cfg.master_seed,
            &[CV_STREAM, task_id, window_id, repeat, source as u64, model_id],
        );
        let on_fit = |local: &[usize]| {
            let global: Vec<usize> = local.iter().map(|&i| train[i]).collect();
            observer.on_fit(&key, source, &global);
        };
        let search = grid_search_observed(&grid, &x_train, &y_train, classes, cfg.k_folds, cv_seed, &on_fit)?;
        observer.on_fit(&key, source, &train);
        let model = TrainedModel::fit(&search.best, &x_train, &y_train, classes)?;
        let preds: Vec<Prediction> = test.iter().map(|&i| model.predict(&project(i))).collect();
        sources.push((preds.iter().map(|p| p.label).collect(), search.best.to_string()));
        predictions.push(preds);
    }
    Ok(UnitResult {
        test_labels: test.iter().map(|&i| data[i].label).collect(),
        split_seed,
        sources,
    })
}

/// Runs split, grid search, refit and test evaluation for every configured
/// task, window, model and repeat, and pools the repeats into report cells.
///
/// Fails as a whole if any unit fails.
pub fn run_experiment(
    data: &BTreeMap<Window, Vec<LabeledFeatures>>,
    cfg: &ExperimentConfig,
    observer: &dyn FitObserver,
) -> Result<ExperimentReport, EvalError> {
    if cfg.n_seeds == 0 {
        return Err(EvalError::InvalidConfig("n_seeds must be at least 1".into()));
    }
    let mut tasks = cfg.tasks.clone();
    tasks.sort();
    tasks.dedup();
    let mut windows = cfg.windows.clone();
    windows.sort();
    windows.dedup();
    let mut models = cfg.models.clone();
    models.sort();
    models.dedup();

    let mut task_rows: BTreeMap<(ComparisonTask, Window), Vec<usize>> = BTreeMap::new();
    for &task in &tasks {
        for &window in &windows {
            let set = data.get(&window).ok_or_else(|| {
                EvalError::InvalidConfig(format!("no dataset for window {window} s"))
            })?;
            let rows: Vec<usize> = (0..set.len())
                .filter(|&i| task.classes().contains(&set[i].label))
                .collect();
            task_rows.insert((task, window), rows);
        }
    }

    let mut units = Vec::new();
    for &task in &tasks {
        for &window in &windows {
            for &model in &models {
                for repeat in 0..cfg.n_seeds {
                    units.push(UnitKey { task, window, model, repeat });
                }
            }
        }
    }
    let results = units
        .par_iter()
        .map(|key| {
            let rows = &task_rows[&(key.task, key.window)];
            run_unit(*key, rows, &data[&key.window], cfg, observer).map_err(|e| EvalError::Cell {
                task: key.task,
                window_s: key.window.whole_seconds(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut cells = Vec::new();
    for (chunk, key) in results.chunks(cfg.n_seeds).zip(units.chunks(cfg.n_seeds)) {
        let key = key[0];
        for (s, source) in SignalSource::ALL.into_iter().enumerate() {
            cells.push(pool_cell(key, source, chunk.iter().map(|u| (u, &u.sources[s])), cfg)?);
        }
    }
    cells.sort_by_key(|c| (c.task, c.window_s, c.source, c.model));
    Ok(ExperimentReport {
        metadata: ReportMetadata::for_config(cfg),
        cells,
    })
}

fn pool_cell<'a>(
    key: UnitKey,
    source: SignalSource,
    repeats: impl Iterator<Item = (&'a UnitResult, &'a (Vec<ClassLabel>, String))>,
    cfg: &ExperimentConfig,
) -> Result<ReportCell, EvalError> {
    let classes = key.task.classes();
    let pos = |c: ClassLabel| classes.iter().position(|&k| k == c).expect("label in task");
    let mut confusion = vec![vec![0u64; classes.len()]; classes.len()];
    let mut correct = Vec::new();
    let mut per_seed_accuracy = Vec::new();
    let mut chosen_hyperparams = Vec::new();
    let mut seeds = Vec::new();
    for (unit, (predicted, chosen)) in repeats {
        let mut hits = 0;
        for (&truth, &guess) in unit.test_labels.iter().zip(predicted) {
            confusion[pos(truth)][pos(guess)] += 1;
            let ok = truth == guess;
            hits += ok as usize;
            correct.push(ok as u8 as f64);
        }
        per_seed_accuracy.push(hits as f64 / predicted.len() as f64);
        chosen_hyperparams.push(chosen.clone());
        seeds.push(unit.split_seed);
    }
    let trace: u64 = (0..classes.len()).map(|i| confusion[i][i]).sum();
    let total: u64 = confusion.iter().flatten().sum();
    let mean_accuracy = trace as f64 / total as f64;
    let boot_seed = derive_seed(
        cfg.master_seed,
        &[
            BOOT_STREAM,
            key.task as u64,
            key.window.whole_seconds() as u64,
            source as u64,
            key.model as u64,
        ],
    );
    let (lo, hi) = bootstrap_ci(&correct, cfg.n_boot, cfg.alpha, boot_seed)?;
    Ok(ReportCell {
        task: key.task,
        window_s: key.window.whole_seconds(),
        source,
        model: key.model,
        classes: classes.to_vec(),
        mean_accuracy,
        ci_low: lo.min(mean_accuracy),
        ci_high: hi.max(mean_accuracy),
        confusion,
        per_seed_accuracy,
        chosen_hyperparams,
        seeds,
    })
}
