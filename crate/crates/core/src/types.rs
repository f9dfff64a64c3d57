//! Domain types shared across the pipeline.
//!
//! Units are seconds and hertz throughout. Sample indices are always derived
//! from a time and a sample rate, never stored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Violation of a domain-type invariant at construction time.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("sample rate must be positive and finite, got {0}")]
    BadSampleRate(f64),
    #[error("recording needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("channel {channel} has {len} samples, expected {expected}")]
    RaggedChannels {
        channel: ChannelKind,
        len: usize,
        expected: usize,
    },
    #[error("non-finite sample in channel {channel} at index {index}")]
    NonFiniteSample { channel: ChannelKind, index: usize },
    #[error("annotation onset {onset_s} s outside recording span [0, {duration_s}) s")]
    OnsetOutOfRange { onset_s: f64, duration_s: f64 },
    #[error("baseline is derived and cannot be annotated")]
    BaselineAnnotation,
    #[error("unsupported window length {0} s (expected 3, 5, 7 or 10)")]
    BadWindow(f64),
    #[error("feature vector has {values} values but {layout} layout entries")]
    LayoutMismatch { values: usize, layout: usize },
    #[error("feature vector contains NaN at position {0}")]
    NanFeature(usize),
}

/// One of the four recorded physiological channels.
///
/// The derived ordering (ECG < EDA < PPG < RESP) fixes the column order of
/// every matrix and concatenated feature vector.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum ChannelKind {
    Ecg,
    Eda,
    Ppg,
    Resp,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::Ecg,
        ChannelKind::Eda,
        ChannelKind::Ppg,
        ChannelKind::Resp,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Lower-case column name used in every file format.
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Ecg => "ecg",
            ChannelKind::Eda => "eda",
            ChannelKind::Ppg => "ppg",
            ChannelKind::Resp => "resp",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChannelKind::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| s.to_string())
    }
}

/// Physiological state of an epoch.
///
/// The derived ordering (Startle < Surprise < Baseline) is the final
/// tie-breaker wherever two labels score equally.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum ClassLabel {
    Startle,
    Surprise,
    Baseline,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 3] = [
        ClassLabel::Startle,
        ClassLabel::Surprise,
        ClassLabel::Baseline,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Startle => "startle",
            ClassLabel::Surprise => "surprise",
            ClassLabel::Baseline => "baseline",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassLabel::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| s.trim().to_string())
    }
}

/// Epoch length. Only the four durations used by the evaluation grid exist.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Window {
    S3,
    S5,
    S7,
    S10,
}

impl Window {
    pub const ALL: [Window; 4] = [Window::S3, Window::S5, Window::S7, Window::S10];

    pub fn seconds(self) -> f64 {
        self.whole_seconds() as f64
    }

    pub fn whole_seconds(self) -> u32 {
        match self {
            Window::S3 => 3,
            Window::S5 => 5,
            Window::S7 => 7,
            Window::S10 => 10,
        }
    }

    /// Window length in samples: `round(window_s * fs)`, half rounded up.
    pub fn samples(self, sample_rate_hz: f64) -> usize {
        seconds_to_samples(self.seconds(), sample_rate_hz)
    }
}

impl TryFrom<f64> for Window {
    type Error = InvariantError;

    fn try_from(s: f64) -> Result<Self, Self::Error> {
        Window::ALL
            .into_iter()
            .find(|w| w.seconds() == s)
            .ok_or(InvariantError::BadWindow(s))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.whole_seconds())
    }
}

impl FromStr for Window {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: f64 = s
            .trim()
            .trim_end_matches('s')
            .parse()
            .map_err(|_| InvariantError::BadWindow(f64::NAN))?;
        Window::try_from(v)
    }
}

/// `round(t * fs)` with ties rounded up. Negative inputs clamp to zero.
pub fn seconds_to_samples(t_s: f64, sample_rate_hz: f64) -> usize {
    let x = (t_s * sample_rate_hz + 0.5).floor();
    if x <= 0.0 {
        0
    } else {
        x as usize
    }
}

/// A labeled event time inside a recording. Only Startle and Surprise are
/// ever annotated; Baseline windows are derived from the pre-onset signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventAnnotation {
    pub onset_s: f64,
    pub label: ClassLabel,
}

impl EventAnnotation {
    pub fn new(onset_s: f64, label: ClassLabel) -> Result<Self, InvariantError> {
        if label == ClassLabel::Baseline {
            return Err(InvariantError::BaselineAnnotation);
        }
        Ok(Self { onset_s, label })
    }
}

/// A synchronized four-channel recording of one participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecording {
    sample_rate_hz: f64,
    channels: [Vec<f64>; 4],
    annotations: Vec<EventAnnotation>,
    participant_id: String,
}

impl RawRecording {
    /// Builds a recording from per-channel columns in [`ChannelKind`] order.
    pub fn new(
        participant_id: impl Into<String>,
        sample_rate_hz: f64,
        channels: [Vec<f64>; 4],
        annotations: Vec<EventAnnotation>,
    ) -> Result<Self, InvariantError> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(InvariantError::BadSampleRate(sample_rate_hz));
        }
        let n = channels[0].len();
        if n < 2 {
            return Err(InvariantError::TooFewSamples(n));
        }
        for kind in ChannelKind::ALL {
            let col = &channels[kind.index()];
            if col.len() != n {
                return Err(InvariantError::RaggedChannels {
                    channel: kind,
                    len: col.len(),
                    expected: n,
                });
            }
            if let Some(index) = col.iter().position(|v| !v.is_finite()) {
                return Err(InvariantError::NonFiniteSample {
                    channel: kind,
                    index,
                });
            }
        }
        let mut rec = Self {
            sample_rate_hz,
            channels,
            annotations: Vec::new(),
            participant_id: participant_id.into(),
        };
        rec.set_annotations(annotations)?;
        Ok(rec)
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn n_samples(&self) -> usize {
        self.channels[0].len()
    }

    /// Duration covered by the samples, `n / fs`.
    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.sample_rate_hz
    }

    pub fn channel(&self, kind: ChannelKind) -> &[f64] {
        &self.channels[kind.index()]
    }

    pub fn channels(&self) -> &[Vec<f64>; 4] {
        &self.channels
    }

    pub fn annotations(&self) -> &[EventAnnotation] {
        &self.annotations
    }

    pub fn participant_id(&self) -> &str {
        &self.participant_id
    }

    /// Replaces the annotations after validating them against this
    /// recording's span. Stored sorted by onset.
    pub fn set_annotations(
        &mut self,
        mut annotations: Vec<EventAnnotation>,
    ) -> Result<(), InvariantError> {
        let duration_s = self.duration_s();
        for a in &annotations {
            if a.label == ClassLabel::Baseline {
                return Err(InvariantError::BaselineAnnotation);
            }
            if !(a.onset_s >= 0.0 && a.onset_s < duration_s) {
                return Err(InvariantError::OnsetOutOfRange {
                    onset_s: a.onset_s,
                    duration_s,
                });
            }
        }
        annotations.sort_by(|a, b| a.onset_s.total_cmp(&b.onset_s));
        self.annotations = annotations;
        Ok(())
    }

    pub fn with_participant_id(mut self, id: impl Into<String>) -> Self {
        self.participant_id = id.into();
        self
    }

    /// Returns a recording with the same metadata and replaced channel data.
    pub fn with_channels(&self, channels: [Vec<f64>; 4]) -> Result<Self, InvariantError> {
        Self::new(
            self.participant_id.clone(),
            self.sample_rate_hz,
            channels,
            self.annotations.clone(),
        )
    }
}

/// One labeled window holding all four channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Epoch {
    pub label: ClassLabel,
    pub window: Window,
    /// Start of the window, seconds from recording start.
    pub start_s: f64,
    pub sample_rate_hz: f64,
    pub channels: [Vec<f64>; 4],
}

impl Epoch {
    pub fn channel(&self, kind: ChannelKind) -> &[f64] {
        &self.channels[kind.index()]
    }

    pub fn end_s(&self) -> f64 {
        self.start_s + self.window.seconds()
    }
}

/// The five per-channel descriptors, in their fixed order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum FeatureName {
    Mean,
    Std,
    Min,
    Max,
    PeakCount,
}

impl FeatureName {
    pub const ALL: [FeatureName; 5] = [
        FeatureName::Mean,
        FeatureName::Std,
        FeatureName::Min,
        FeatureName::Max,
        FeatureName::PeakCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureName::Mean => "mean",
            FeatureName::Std => "std",
            FeatureName::Min => "min",
            FeatureName::Max => "max",
            FeatureName::PeakCount => "peak_count",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub channel: ChannelKind,
    pub feature: FeatureName,
}

impl FeatureDescriptor {
    /// Column name, e.g. `eda_peak_count`.
    pub fn column_name(&self) -> String {
        format!("{}_{}", self.channel.name(), self.feature.name())
    }

    pub fn parse_column(name: &str) -> Option<Self> {
        let (chan, feat) = name.trim().split_once('_')?;
        let channel = chan.parse().ok()?;
        let feature = FeatureName::ALL.into_iter().find(|f| f.name() == feat)?;
        Some(Self { channel, feature })
    }
}

/// Feature values with one layout descriptor per value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
    layout: Vec<FeatureDescriptor>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, layout: Vec<FeatureDescriptor>) -> Result<Self, InvariantError> {
        if values.len() != layout.len() {
            return Err(InvariantError::LayoutMismatch {
                values: values.len(),
                layout: layout.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(InvariantError::NanFeature(i));
        }
        Ok(Self { values, layout })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn layout(&self) -> &[FeatureDescriptor] {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Channels present, in layout order, without repeats.
    pub fn channels(&self) -> Vec<ChannelKind> {
        let mut out: Vec<ChannelKind> = Vec::new();
        for d in &self.layout {
            if !out.contains(&d.channel) {
                out.push(d.channel);
            }
        }
        out
    }

    /// The sub-vector belonging to one channel, or `None` if absent.
    pub fn select(&self, channel: ChannelKind) -> Option<FeatureVector> {
        let (values, layout): (Vec<f64>, Vec<FeatureDescriptor>) = self
            .values
            .iter()
            .zip(&self.layout)
            .filter(|(_, d)| d.channel == channel)
            .map(|(v, d)| (*v, *d))
            .unzip();
        if values.is_empty() {
            None
        } else {
            Some(FeatureVector { values, layout })
        }
    }
}
