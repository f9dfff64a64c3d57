//! Cutting event and baseline windows out of pre-processed recordings.
//!
//! Event windows start at the annotated onset. Baseline windows end
//! `baseline_guard_s` seconds before the onset, so the two never overlap.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{seconds_to_samples, ClassLabel, Epoch, EventAnnotation, RawRecording, Window};

pub const DEFAULT_BASELINE_GUARD_S: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EpochError {
    #[error("window [{start_s}, {end_s}) s exceeds recording of {duration_s} s")]
    WindowExceedsRecording {
        start_s: f64,
        end_s: f64,
        duration_s: f64,
    },
    #[error("baseline window would start at {start_s} s, before the recording")]
    InsufficientPreOnsetData { start_s: f64 },
    #[error("expected exactly one event annotation, found {0}")]
    AnnotationCount(usize),
    #[error("baseline guard must be non-negative, got {0}")]
    NegativeGuard(f64),
    #[error("participant `{participant}`: {source}")]
    Participant {
        participant: String,
        #[source]
        source: Box<EpochError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochingConfig {
    pub window: Window,
    pub baseline_guard_s: f64,
}

impl EpochingConfig {
    pub fn new(window: Window, baseline_guard_s: f64) -> Result<Self, EpochError> {
        if !(baseline_guard_s >= 0.0 && baseline_guard_s.is_finite()) {
            return Err(EpochError::NegativeGuard(baseline_guard_s));
        }
        Ok(Self {
            window,
            baseline_guard_s,
        })
    }
}

fn cut(rec: &RawRecording, start: usize, len: usize) -> [Vec<f64>; 4] {
    let ch = rec.channels();
    std::array::from_fn(|k| ch[k][start..start + len].to_vec())
}

/// Window `[onset, onset + window)` labeled with the annotation's label.
pub fn extract_event_epoch(
    rec: &RawRecording,
    ann: &EventAnnotation,
    cfg: &EpochingConfig,
) -> Result<Epoch, EpochError> {
    let fs = rec.sample_rate_hz();
    let len = cfg.window.samples(fs);
    let start = seconds_to_samples(ann.onset_s, fs);
    if ann.onset_s < 0.0 || start + len > rec.n_samples() {
        return Err(EpochError::WindowExceedsRecording {
            start_s: ann.onset_s,
            end_s: ann.onset_s + cfg.window.seconds(),
            duration_s: rec.duration_s(),
        });
    }
    Ok(Epoch {
        label: ann.label,
        window: cfg.window,
        start_s: ann.onset_s,
        sample_rate_hz: fs,
        channels: cut(rec, start, len),
    })
}

/// Window `[onset - guard - window, onset - guard)` labeled Baseline.
pub fn extract_baseline_epoch(
    rec: &RawRecording,
    ann: &EventAnnotation,
    cfg: &EpochingConfig,
) -> Result<Epoch, EpochError> {
    let fs = rec.sample_rate_hz();
    let len = cfg.window.samples(fs);
    let end_s = ann.onset_s - cfg.baseline_guard_s;
    let start_s = end_s - cfg.window.seconds();
    let end = seconds_to_samples(end_s, fs);
    if start_s < 0.0 || end < len {
        return Err(EpochError::InsufficientPreOnsetData { start_s });
    }
    if end > rec.n_samples() {
        return Err(EpochError::WindowExceedsRecording {
            start_s,
            end_s,
            duration_s: rec.duration_s(),
        });
    }
    Ok(Epoch {
        label: ClassLabel::Baseline,
        window: cfg.window,
        start_s,
        sample_rate_hz: fs,
        channels: cut(rec, end - len, len),
    })
}

/// One epoch cut from a participant's recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub participant_id: String,
    pub epoch: Epoch,
}

impl DatasetEntry {
    pub fn label(&self) -> ClassLabel {
        self.epoch.label
    }
}

/// Cuts one event epoch and one baseline epoch from every recording. Each
/// recording must carry exactly one annotation. Output is ordered by
/// participant id, event epoch before baseline epoch.
pub fn build_dataset(
    recordings: &[RawRecording],
    cfg: &EpochingConfig,
) -> Result<Vec<DatasetEntry>, EpochError> {
    let mut order: Vec<&RawRecording> = recordings.iter().collect();
    order.sort_by(|a, b| a.participant_id().cmp(b.participant_id()));
    let mut out = Vec::with_capacity(2 * recordings.len());
    for rec in order {
        let tag = |e: EpochError| EpochError::Participant {
            participant: rec.participant_id().to_string(),
            source: Box::new(e),
        };
        let [ann] = rec.annotations() else {
            return Err(tag(EpochError::AnnotationCount(rec.annotations().len())));
        };
        let event = extract_event_epoch(rec, ann, cfg).map_err(tag)?;
        let baseline = extract_baseline_epoch(rec, ann, cfg).map_err(tag)?;
        for epoch in [event, baseline] {
            out.push(DatasetEntry {
                participant_id: rec.participant_id().to_string(),
                epoch,
            });
        }
    }
    Ok(out)
}

/// Keeps every event epoch and only as many Baseline epochs as the largest
/// event class, taking those of the lowest participant ids.
pub fn balance_baseline(dataset: Vec<DatasetEntry>) -> Vec<DatasetEntry> {
    let mut counts: BTreeMap<ClassLabel, usize> = BTreeMap::new();
    for e in &dataset {
        *counts.entry(e.label()).or_default() += 1;
    }
    let target = counts
        .iter()
        .filter(|(l, _)| **l != ClassLabel::Baseline)
        .map(|(_, c)| *c)
        .max()
        .unwrap_or(0);
    let mut baseline_ids: Vec<&str> = dataset
        .iter()
        .filter(|e| e.label() == ClassLabel::Baseline)
        .map(|e| e.participant_id.as_str())
        .collect();
    baseline_ids.sort_unstable();
    baseline_ids.truncate(target);
    let keep: std::collections::BTreeSet<String> =
        baseline_ids.into_iter().map(str::to_string).collect();
    dataset
        .into_iter()
        .filter(|e| e.label() != ClassLabel::Baseline || keep.contains(&e.participant_id))
        .collect()
}
