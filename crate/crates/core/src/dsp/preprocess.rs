use serde::{Deserialize, Serialize};

use super::{apply_zero_phase, design_butterworth, design_notch, BiquadCascade, DspError, FilterKind};
use crate::types::{ChannelKind, RawRecording};

/// Per-modality filter settings. Defaults reproduce the standard chain:
/// ECG high-pass 0.6 Hz, low-pass 100 Hz and a 50 Hz notch; PPG band-pass
/// 0.5-5 Hz; EDA and RESP low-pass 5 Hz; all Butterworth of order 4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub order: usize,
    pub ecg_highpass_hz: f64,
    pub ecg_lowpass_hz: f64,
    pub notch_hz: f64,
    pub notch_q: f64,
    pub ppg_band_hz: (f64, f64),
    /// Also apply a separate high-pass at the band's low edge after the
    /// PPG band-pass.
    pub ppg_extra_hp: bool,
    pub eda_lowpass_hz: f64,
    pub resp_lowpass_hz: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            order: 4,
            ecg_highpass_hz: 0.6,
            ecg_lowpass_hz: 100.0,
            notch_hz: 50.0,
            notch_q: 30.0,
            ppg_band_hz: (0.5, 5.0),
            ppg_extra_hp: false,
            eda_lowpass_hz: 5.0,
            resp_lowpass_hz: 5.0,
        }
    }
}

impl PreprocessConfig {
    /// The filter stages for one channel, in application order.
    pub fn stages(&self, kind: ChannelKind, fs_hz: f64) -> Result<Vec<BiquadCascade>, DspError> {
        let n = self.order;
        Ok(match kind {
            ChannelKind::Ecg => {
                let min_hz = 2.0 * self.ecg_lowpass_hz;
                if fs_hz <= min_hz {
                    return Err(DspError::UnsupportedRate {
                        channel: kind,
                        fs_hz,
                        min_hz,
                    });
                }
                vec![
                    design_butterworth(n, FilterKind::Highpass, &[self.ecg_highpass_hz], fs_hz)?,
                    design_butterworth(n, FilterKind::Lowpass, &[self.ecg_lowpass_hz], fs_hz)?,
                    design_notch(self.notch_hz, self.notch_q, fs_hz)?,
                ]
            }
            ChannelKind::Ppg => {
                let (lo, hi) = self.ppg_band_hz;
                let mut v = vec![design_butterworth(n, FilterKind::Bandpass, &[lo, hi], fs_hz)?];
                if self.ppg_extra_hp {
                    v.push(design_butterworth(n, FilterKind::Highpass, &[lo], fs_hz)?);
                }
                v
            }
            ChannelKind::Eda => {
                vec![design_butterworth(n, FilterKind::Lowpass, &[self.eda_lowpass_hz], fs_hz)?]
            }
            ChannelKind::Resp => {
                vec![design_butterworth(n, FilterKind::Lowpass, &[self.resp_lowpass_hz], fs_hz)?]
            }
        })
    }
}

/// Filters one channel with its modality's chain, each stage zero-phase.
pub fn preprocess_channel(
    kind: ChannelKind,
    signal: &[f64],
    fs_hz: f64,
    cfg: &PreprocessConfig,
) -> Result<Vec<f64>, DspError> {
    let mut out = signal.to_vec();
    for stage in cfg.stages(kind, fs_hz)? {
        out = apply_zero_phase(&stage, &out)?;
    }
    Ok(out)
}

/// Filters all four channels of a recording; metadata is carried over.
pub fn preprocess_recording(
    rec: &RawRecording,
    cfg: &PreprocessConfig,
) -> Result<RawRecording, DspError> {
    let fs = rec.sample_rate_hz();
    let mut channels: [Vec<f64>; 4] = Default::default();
    for kind in ChannelKind::ALL {
        channels[kind.index()] = preprocess_channel(kind, rec.channel(kind), fs, cfg)?;
    }
    // Filtering finite input with stable sections keeps every sample finite.
    Ok(rec
        .with_channels(channels)
        .expect("filtered channels keep the recording's shape"))
}
