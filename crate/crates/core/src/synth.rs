//! Synthetic four-channel recordings with controllable startle and surprise
//! responses.
//!
//! Morphologies are deliberately simple: a Gaussian spike per heartbeat for
//! ECG, a delayed pulse per beat for PPG, a bi-exponential skin conductance
//! response for EDA and a sinusoid for respiration. Every random draw is made
//! regardless of the label, so two recordings with the same seed differ only
//! through the label's effect sizes.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::derive_seed;
use crate::types::{ClassLabel, EventAnnotation, InvariantError, RawRecording};

pub const DEFAULT_DURATION_S: f64 = 420.0;
pub const DEFAULT_ONSET_S: f64 = 300.0;
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 1000.0;
pub const MIN_SAMPLE_RATE_HZ: f64 = 250.0;
/// Post-onset signal required after the event.
pub const MIN_POST_ONSET_S: f64 = 15.0;
pub const MIN_BENCHMARK_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("duration {duration_s} s leaves less than {MIN_POST_ONSET_S} s after onset {onset_s} s")]
    InvalidDuration { duration_s: f64, onset_s: f64 },
    #[error("sample rate {0} Hz below {MIN_SAMPLE_RATE_HZ} Hz")]
    RateTooLow(f64),
    #[error("only startle and surprise recordings can be generated, got {0}")]
    NotAnEvent(ClassLabel),
    #[error("invalid effect parameters: {0}")]
    InvalidParams(String),
    #[error("benchmark needs at least {MIN_BENCHMARK_SIZE} recordings per class, got {0}")]
    TooFewPerClass(usize),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// Response to one kind of event, before scaling by separability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventEffect {
    /// Peak of the skin conductance response.
    pub eda_scr_amplitude: f64,
    pub hr_delta_bpm: f64,
    pub resp_rate_delta_hz: f64,
    /// Relative change of PPG pulse amplitude (negative for vasoconstriction).
    pub ppg_amplitude_delta: f64,
    /// Relative change of breathing depth.
    pub resp_amplitude_delta: f64,
}

/// Standard deviation of the additive white noise on each channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelNoise {
    pub ecg: f64,
    pub eda: f64,
    pub ppg: f64,
    pub resp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectParams {
    pub startle: EventEffect,
    pub surprise: EventEffect,
    pub noise_std: ChannelNoise,
    /// Multiplies every event effect; 0 makes the two events identical.
    pub separability: f64,
    pub baseline_hr_bpm: f64,
    pub baseline_resp_hz: f64,
    /// Scales the spread of per-recording physiology (resting heart and
    /// breathing rate, tonic skin conductance, amplitudes); 0 gives every
    /// recording the baseline values.
    pub subject_variability: f64,
}

impl Default for EffectParams {
    fn default() -> Self {
        Self {
            startle: EventEffect {
                eda_scr_amplitude: 1.0,
                hr_delta_bpm: 15.0,
                resp_rate_delta_hz: 0.15,
                ppg_amplitude_delta: -0.4,
                resp_amplitude_delta: 0.4,
            },
            surprise: EventEffect {
                eda_scr_amplitude: 0.4,
                hr_delta_bpm: -12.0,
                resp_rate_delta_hz: 0.0,
                ppg_amplitude_delta: -0.3,
                resp_amplitude_delta: -0.4,
            },
            noise_std: ChannelNoise {
                ecg: 0.002,
                eda: 0.05,
                ppg: 0.2,
                resp: 0.1,
            },
            separability: 1.0,
            baseline_hr_bpm: 70.0,
            baseline_resp_hz: 0.25,
            subject_variability: 1.0,
        }
    }
}

impl EffectParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let n = self.noise_std;
        let bad = |what: &str| Err(SynthError::InvalidParams(what.to_string()));
        if !(self.separability >= 0.0 && self.separability.is_finite()) {
            return bad("separability must be finite and non-negative");
        }
        if !(self.subject_variability >= 0.0 && self.subject_variability.is_finite()) {
            return bad("subject variability must be finite and non-negative");
        }
        if ![n.ecg, n.eda, n.ppg, n.resp].iter().all(|s| *s >= 0.0 && s.is_finite()) {
            return bad("noise standard deviations must be finite and non-negative");
        }
        if !(self.baseline_hr_bpm > 0.0 && self.baseline_resp_hz > 0.0) {
            return bad("baseline heart and breathing rates must be positive");
        }
        for e in [self.startle, self.surprise] {
            if !(e.eda_scr_amplitude >= 0.0
                && e.hr_delta_bpm.is_finite()
                && e.resp_rate_delta_hz.is_finite()
                && e.ppg_amplitude_delta > -1.0
                && e.resp_amplitude_delta > -1.0
                && e.ppg_amplitude_delta.is_finite()
                && e.resp_amplitude_delta.is_finite())
            {
                return bad("event effects must be finite, SCR amplitude non-negative and amplitude changes above -1");
            }
        }
        Ok(())
    }

    fn effect(&self, label: ClassLabel) -> EventEffect {
        let e = match label {
            ClassLabel::Startle => self.startle,
            _ => self.surprise,
        };
        EventEffect {
            eda_scr_amplitude: e.eda_scr_amplitude * self.separability,
            hr_delta_bpm: e.hr_delta_bpm * self.separability,
            resp_rate_delta_hz: e.resp_rate_delta_hz * self.separability,
            ppg_amplitude_delta: e.ppg_amplitude_delta * self.separability,
            resp_amplitude_delta: e.resp_amplitude_delta * self.separability,
        }
    }
}

/// Length, event time and sampling rate of a generated recording.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordingSpec {
    pub duration_s: f64,
    pub onset_s: f64,
    pub fs_hz: f64,
}

impl Default for RecordingSpec {
    fn default() -> Self {
        Self {
            duration_s: DEFAULT_DURATION_S,
            onset_s: DEFAULT_ONSET_S,
            fs_hz: DEFAULT_SAMPLE_RATE_HZ,
        }
    }
}

const SPIKE_SIGMA_S: f64 = 0.008;
/// Beat-to-beat relative spread of spike and pulse amplitudes.
const SPIKE_BEAT_SD: f64 = 0.15;
const PULSE_BEAT_SD: f64 = 0.15;
const PULSE_RISE_S: f64 = 0.12;
const HR_TAU_S: f64 = 0.7;
const RESP_TAU_S: f64 = 1.0;
const SCR_LATENCY_S: f64 = 0.3;
const SCR_RISE_S: f64 = 0.7;
const SCR_DECAY_S: f64 = 5.0;
/// Rate and amplitude range of spontaneous skin conductance responses.
const SPONTANEOUS_SCR_PER_S: f64 = 4.0 / 60.0;
const SPONTANEOUS_SCR_AMP: (f64, f64) = (0.2, 0.8);

/// `1 - exp(-t/tau)` after `t = 0`, zero before.
fn ramp(t: f64, tau: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        1.0 - (-t / tau).exp()
    }
}

/// Bi-exponential skin conductance response scaled to a unit peak.
fn scr(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let shape = |t: f64| (-t / SCR_DECAY_S).exp() - (-t / SCR_RISE_S).exp();
    let t_peak = (SCR_DECAY_S * SCR_RISE_S / (SCR_DECAY_S - SCR_RISE_S))
        * (SCR_DECAY_S / SCR_RISE_S).ln();
    shape(t) / shape(t_peak)
}

/// Per-recording physiology drawn before any label-dependent work.
struct Subject {
    hr_bpm: f64,
    resp_hz: f64,
    beat_phase: f64,
    resp_phase: f64,
    beat_jitter_s: f64,
    spike_amp: f64,
    pulse_amp: f64,
    resp_amp: f64,
    transit_s: f64,
    tonic: f64,
    tonic_slope: f64,
    scr_gain: f64,
    wander_phase: f64,
    /// Onset time and amplitude of each spontaneous SCR.
    spontaneous: Vec<(f64, f64)>,
}

impl Subject {
    fn draw(rng: &mut ChaCha8Rng, p: &EffectParams, duration_s: f64) -> Self {
        let v = p.subject_variability;
        let mut z = || v * Normal::new(0.0, 1.0).unwrap().sample(rng);
        let hr_bpm = p.baseline_hr_bpm + 3.0 * z();
        let resp_hz = p.baseline_resp_hz * (1.0 + 0.08 * z()).max(0.2);
        let spike_amp = 1.0 + 0.05 * z();
        let pulse_amp = 1.0 + 0.15 * z();
        let resp_amp = 1.0 + 0.15 * z();
        let tonic = 5.0 + 0.5 * z();
        let tonic_slope = 0.001 * z();
        let scr_gain = (1.0 + 0.2 * z()).max(0.1);
        let gap = rand_distr::Exp::new(SPONTANEOUS_SCR_PER_S).unwrap();
        let mut spontaneous = Vec::new();
        let mut t = gap.sample(rng);
        while t < duration_s {
            let amp = rng.gen_range(SPONTANEOUS_SCR_AMP.0..SPONTANEOUS_SCR_AMP.1);
            spontaneous.push((t, amp));
            t += gap.sample(rng);
        }
        Self {
            hr_bpm,
            resp_hz,
            beat_phase: rng.gen(),
            resp_phase: rng.gen(),
            beat_jitter_s: 0.01 * v,
            spike_amp,
            pulse_amp,
            resp_amp,
            transit_s: 0.2 + v * rng.gen_range(-0.05..0.05),
            tonic,
            tonic_slope,
            scr_gain,
            wander_phase: rng.gen_range(0.0..2.0 * PI),
            spontaneous,
        }
    }
}

/// Upper bound on the beat count (240 bpm); per-beat draws are made for
/// every slot.
fn beat_slots(spec: &RecordingSpec) -> usize {
    (spec.duration_s * 4.0).ceil() as usize
}

/// Beat times from integrating the instantaneous heart rate, with small
/// Gaussian jitter on each beat.
fn beat_times(
    s: &Subject,
    effect: &EventEffect,
    spec: &RecordingSpec,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let jitter = Normal::new(0.0, s.beat_jitter_s).unwrap();
    let dt = 1.0 / spec.fs_hz;
    let n = (spec.duration_s * spec.fs_hz).round() as usize;
    let mut beats = Vec::new();
    let mut phase = s.beat_phase;
    for i in 0..n {
        let t = i as f64 * dt;
        let hr = s.hr_bpm + effect.hr_delta_bpm * ramp(t - spec.onset_s, HR_TAU_S);
        phase += hr.max(1.0) / 60.0 * dt;
        if phase >= 1.0 {
            phase -= 1.0;
            beats.push(t);
        }
    }
    // A fixed number of draws keeps the random stream independent of the
    // label, which changes the beat count.
    let draws: Vec<f64> = (0..beat_slots(spec)).map(|_| jitter.sample(rng)).collect();
    for (b, d) in beats.iter_mut().zip(draws) {
        *b += d;
    }
    beats
}

/// Generates one recording with its event annotation attached. The
/// participant id is left empty.
pub fn synth_recording(
    label: ClassLabel,
    spec: &RecordingSpec,
    seed: u64,
    params: &EffectParams,
) -> Result<(RawRecording, EventAnnotation), SynthError> {
    if label == ClassLabel::Baseline {
        return Err(SynthError::NotAnEvent(label));
    }
    if !(spec.fs_hz >= MIN_SAMPLE_RATE_HZ) || !spec.fs_hz.is_finite() {
        return Err(SynthError::RateTooLow(spec.fs_hz));
    }
    if !(spec.onset_s >= 0.0 && spec.duration_s > spec.onset_s + MIN_POST_ONSET_S)
        || !spec.duration_s.is_finite()
    {
        return Err(SynthError::InvalidDuration {
            duration_s: spec.duration_s,
            onset_s: spec.onset_s,
        });
    }
    params.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subject = Subject::draw(&mut rng, params, spec.duration_s);
    let effect = params.effect(label);
    let beats = beat_times(&subject, &effect, spec, &mut rng);
    let unit = Normal::new(0.0, params.subject_variability).expect("validated variability");
    let beat_gains: Vec<(f64, f64)> = (0..beat_slots(spec))
        .map(|_| {
            (
                1.0 + SPIKE_BEAT_SD * unit.sample(&mut rng),
                1.0 + PULSE_BEAT_SD * unit.sample(&mut rng),
            )
        })
        .collect();

    let n = (spec.duration_s * spec.fs_hz).round() as usize;
    let fs = spec.fs_hz;
    let t = |i: usize| i as f64 / fs;

    let mut ecg = vec![0.0; n];
    let mut ppg = vec![0.0; n];
    let spike_reach = (5.0 * SPIKE_SIGMA_S * fs).ceil() as i64;
    let pulse_reach = (8.0 * PULSE_RISE_S * fs).ceil() as i64;
    for (&b, &(spike_gain, pulse_gain)) in beats.iter().zip(&beat_gains) {
        let centre = (b * fs).round() as i64;
        for i in (centre - spike_reach).max(0)..(centre + spike_reach + 1).min(n as i64) {
            let d = t(i as usize) - b;
            ecg[i as usize] += spike_gain * subject.spike_amp * (-d * d / (2.0 * SPIKE_SIGMA_S * SPIKE_SIGMA_S)).exp();
        }
        let start = b + subject.transit_s;
        let pulse_scale = subject.pulse_amp
            * (1.0 + effect.ppg_amplitude_delta * ramp(b - spec.onset_s, HR_TAU_S));
        let first = (start * fs).ceil() as i64;
        for i in first.max(0)..(first + pulse_reach).min(n as i64) {
            let u = (t(i as usize) - start) / PULSE_RISE_S;
            ppg[i as usize] += pulse_gain * pulse_scale * u * (1.0 - u).exp();
        }
    }

    let mut resp = vec![0.0; n];
    let mut phase = subject.resp_phase;
    for (i, r) in resp.iter_mut().enumerate() {
        let depth = 1.0 + effect.resp_amplitude_delta * ramp(t(i) - spec.onset_s, RESP_TAU_S);
        *r = subject.resp_amp * depth * (2.0 * PI * phase).sin();
        let rate = subject.resp_hz + effect.resp_rate_delta_hz * ramp(t(i) - spec.onset_s, RESP_TAU_S);
        phase += rate / fs;
    }

    let mut eda: Vec<f64> = (0..n)
        .map(|i| {
            subject.tonic
                + subject.tonic_slope * t(i)
                + subject.scr_gain
                    * effect.eda_scr_amplitude
                    * scr(t(i) - spec.onset_s - SCR_LATENCY_S)
        })
        .collect();
    let scr_reach_s = 12.0 * SCR_DECAY_S;
    for &(onset, amp) in &subject.spontaneous {
        let first = (onset * fs).ceil() as usize;
        let last = (((onset + scr_reach_s) * fs) as usize).min(n);
        for (i, e) in eda.iter_mut().enumerate().take(last).skip(first) {
            *e += amp * scr(t(i) - onset);
        }
    }

    for (i, e) in ecg.iter_mut().enumerate() {
        *e += 0.1 * (2.0 * PI * 0.15 * t(i) + subject.wander_phase).sin();
    }

    let noise = params.noise_std;
    let mut channels = [ecg, eda, ppg, resp];
    for (signal, std) in channels.iter_mut().zip([noise.ecg, noise.eda, noise.ppg, noise.resp]) {
        let dist = Normal::new(0.0, std).expect("validated noise");
        for v in signal.iter_mut() {
            *v += dist.sample(&mut rng);
        }
    }

    let annotation = EventAnnotation::new(spec.onset_s, label)?;
    let rec = RawRecording::new("", fs, channels, vec![annotation])?;
    Ok((rec, annotation))
}

/// `n_per_class` startle and `n_per_class` surprise recordings, alternating
/// labels across participant ids `p000`, `p001`, ... Each recording gets a
/// seed derived from `seed` and its index.
pub fn synth_benchmark(
    n_per_class: usize,
    spec: &RecordingSpec,
    seed: u64,
    params: &EffectParams,
) -> Result<Vec<RawRecording>, SynthError> {
    if n_per_class < MIN_BENCHMARK_SIZE {
        return Err(SynthError::TooFewPerClass(n_per_class));
    }
    (0..2 * n_per_class)
        .into_par_iter()
        .map(|i| {
            let label = if i % 2 == 0 {
                ClassLabel::Startle
            } else {
                ClassLabel::Surprise
            };
            let (rec, _) = synth_recording(label, spec, benchmark_seed(seed, i), params)?;
            Ok(rec.with_participant_id(format!("p{i:03}")))
        })
        .collect()
}

/// Seed of the `index`-th recording of a benchmark.
pub fn benchmark_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, &[index as u64])
}
