//! One synthetic startle recording through the signal chain: filter every
//! channel, cut the event and baseline epochs, and print the per-modality
//! feature vectors side by side.
//!
//! Usage: cargo run --example preprocess_and_features [window_s]

use startle_surprise::dsp::{preprocess_recording, PreprocessConfig};
use startle_surprise::epoch::{
    extract_baseline_epoch, extract_event_epoch, EpochingConfig, DEFAULT_BASELINE_GUARD_S,
};
use startle_surprise::features::extract_features;
use startle_surprise::synth::{synth_recording, EffectParams, RecordingSpec};
use startle_surprise::{ChannelKind, ClassLabel, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seconds: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(5.0);
    let window = Window::try_from(seconds)?;

    let (raw, ann) = synth_recording(ClassLabel::Startle, &RecordingSpec::default(), 11, &EffectParams::default())?;
    println!(
        "recording: {} samples at {} Hz, {} onset at {} s",
        raw.n_samples(),
        raw.sample_rate_hz(),
        ann.label,
        ann.onset_s
    );
    let clean = preprocess_recording(&raw, &PreprocessConfig::default())?;

    let cfg = EpochingConfig::new(window, DEFAULT_BASELINE_GUARD_S)?;
    let event = extract_event_epoch(&clean, &ann, &cfg)?;
    let baseline = extract_baseline_epoch(&clean, &ann, &cfg)?;
    println!("{window} epochs: event from {} s, baseline from {} s\n", event.start_s, baseline.start_s);

    let fe = extract_features(&event, &ChannelKind::ALL)?;
    let fb = extract_features(&baseline, &ChannelKind::ALL)?;
    println!("{:<18}{:>14}{:>14}", "feature", "baseline", "startle");
    for ((d, b), e) in fe.layout().iter().zip(fb.values()).zip(fe.values()) {
        println!("{:<18}{b:>14.4}{e:>14.4}", d.column_name());
    }
    Ok(())
}
