//! Per-channel statistical descriptors: mean, population standard
//! deviation, minimum, maximum and the count of local maxima above the mean.

use thiserror::Error;

use crate::types::{ChannelKind, Epoch, FeatureDescriptor, FeatureName, FeatureVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("signal of {0} samples is too short (need at least 3)")]
    SignalTooShort(usize),
    #[error("modality {0} missing")]
    MissingModality(ChannelKind),
    #[error("no modalities requested")]
    NoModalities,
}

/// Number of local maxima that exceed the signal mean.
///
/// A maximum is an index with a strictly smaller neighbour on each side; a
/// flat top (`x[i-1] < x[i] = .. = x[i+k] > x[i+k+1]`) counts once.
pub fn peak_count(signal: &[f64]) -> Result<usize, FeatureError> {
    let n = signal.len();
    if n < 3 {
        return Err(FeatureError::SignalTooShort(n));
    }
    let mean = mean(signal);
    let mut count = 0;
    let mut i = 1;
    while i < n - 1 {
        if signal[i] > signal[i - 1] {
            let mut j = i;
            while j + 1 < n && signal[j + 1] == signal[i] {
                j += 1;
            }
            if j + 1 < n && signal[j + 1] < signal[i] && signal[i] > mean {
                count += 1;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    Ok(count)
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// `[mean, std, min, max, peak_count]` of one signal.
pub fn channel_features(signal: &[f64]) -> Result<[f64; 5], FeatureError> {
    let peaks = peak_count(signal)?;
    let m = mean(signal);
    let var = signal.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / signal.len() as f64;
    let (min, max) = signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    // rounding can push the mean a hair outside [min, max] on constant input
    let m = m.clamp(min, max);
    Ok([m, var.sqrt(), min, max, peaks as f64])
}

/// Feature vector over the requested modalities, always laid out in
/// channel order regardless of the order requested.
pub fn extract_features(
    epoch: &Epoch,
    modalities: &[ChannelKind],
) -> Result<FeatureVector, FeatureError> {
    let mut kinds = modalities.to_vec();
    kinds.sort();
    kinds.dedup();
    if kinds.is_empty() {
        return Err(FeatureError::NoModalities);
    }
    let mut values = Vec::with_capacity(5 * kinds.len());
    let mut layout = Vec::with_capacity(5 * kinds.len());
    for kind in kinds {
        let signal = epoch.channel(kind);
        if signal.is_empty() {
            return Err(FeatureError::MissingModality(kind));
        }
        values.extend(channel_features(signal)?);
        layout.extend(FeatureName::ALL.map(|feature| FeatureDescriptor {
            channel: kind,
            feature,
        }));
    }
    Ok(FeatureVector::new(values, layout).expect("features are finite for finite epochs"))
}
