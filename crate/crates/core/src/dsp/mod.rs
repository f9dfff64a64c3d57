//! IIR filter design and zero-phase application.
//!
//! Filters are realized as cascades of second-order sections. Butterworth
//! designs go through the bilinear transform with the cutoffs pre-warped, so
//! the digital response hits -3 dB exactly at each requested cutoff.

mod design;
mod filtfilt;
mod preprocess;

pub use design::{design_butterworth, design_notch, frequency_response};
pub use filtfilt::{apply_zero_phase, pad_length};
pub use preprocess::{preprocess_channel, preprocess_recording, PreprocessConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::ChannelKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DspError {
    #[error("cutoff {cutoff_hz} Hz is not below Nyquist ({nyquist_hz} Hz)")]
    CutoffAboveNyquist { cutoff_hz: f64, nyquist_hz: f64 },
    #[error("cutoff must be positive, got {0} Hz")]
    NonPositiveCutoff(f64),
    #[error("filter order must be even, got {0}")]
    OddOrder(usize),
    #[error("filter order {0} unsupported (expected 2, 4, 6 or 8)")]
    UnsupportedOrder(usize),
    #[error("invalid band: {0}")]
    InvalidBand(String),
    #[error("notch quality factor must be positive, got {0}")]
    NonPositiveQ(f64),
    #[error("sample rate must be positive, got {0}")]
    BadSampleRate(f64),
    #[error("signal of {len} samples too short for edge padding of {pad}")]
    SignalTooShort { len: usize, pad: usize },
    #[error("{channel} filtering needs fs > {min_hz} Hz, got {fs_hz} Hz")]
    UnsupportedRate {
        channel: ChannelKind,
        fs_hz: f64,
        min_hz: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterKind {
    Lowpass,
    Highpass,
    Bandpass,
    Notch,
}

/// One second-order section, `a0` normalized to 1.
///
/// `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    pub const IDENTITY: Biquad = Biquad {
        b0: 1.0,
        b1: 0.0,
        b2: 0.0,
        a1: 0.0,
        a2: 0.0,
    };

    /// Largest pole modulus.
    pub fn pole_radius(&self) -> f64 {
        // z^2 + a1 z + a2
        let disc = self.a1 * self.a1 - 4.0 * self.a2;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let r1 = (-self.a1 + s) / 2.0;
            let r2 = (-self.a1 - s) / 2.0;
            r1.abs().max(r2.abs())
        } else {
            // complex pair, |z|^2 = a2
            self.a2.sqrt()
        }
    }

    pub fn is_stable(&self) -> bool {
        self.pole_radius() < 1.0
    }

    /// DC gain `H(1)`.
    pub fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMeta {
    pub kind: FilterKind,
    pub order: usize,
    pub cutoffs_hz: Vec<f64>,
    pub fs_hz: f64,
    pub q: Option<f64>,
}

/// A designed filter: second-order sections applied in sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiquadCascade {
    sections: Vec<Biquad>,
    meta: DesignMeta,
}

impl BiquadCascade {
    pub(crate) fn new(sections: Vec<Biquad>, meta: DesignMeta) -> Self {
        debug_assert!(!sections.is_empty());
        debug_assert!(sections.iter().all(Biquad::is_stable));
        Self { sections, meta }
    }

    /// Wraps hand-built sections, e.g. for tests of the application path.
    pub fn from_sections(sections: Vec<Biquad>, fs_hz: f64) -> Self {
        let order = 2 * sections.len();
        Self {
            sections,
            meta: DesignMeta {
                kind: FilterKind::Lowpass,
                order,
                cutoffs_hz: Vec::new(),
                fs_hz,
                q: None,
            },
        }
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    pub fn meta(&self) -> &DesignMeta {
        &self.meta
    }

    pub fn fs_hz(&self) -> f64 {
        self.meta.fs_hz
    }

    /// Concatenates two cascades; the result applies `self` first.
    pub fn then(&self, other: &BiquadCascade) -> BiquadCascade {
        let mut sections = self.sections.clone();
        sections.extend_from_slice(&other.sections);
        BiquadCascade {
            sections,
            meta: self.meta.clone(),
        }
    }
}
