use super::{Biquad, BiquadCascade, DspError};

/// Edge padding used by [`apply_zero_phase`]: three samples per filter order.
pub fn pad_length(filter: &BiquadCascade) -> usize {
    3 * (2 * filter.sections().len())
}

/// Steady-state section states for a unit step, scaled through the cascade.
fn step_states(sections: &[Biquad]) -> Vec<[f64; 2]> {
    let mut scale = 1.0;
    sections
        .iter()
        .map(|s| {
            let g = s.dc_gain();
            let z2 = s.b2 - s.a2 * g;
            let z1 = s.b1 - s.a1 * g + z2;
            let zi = [scale * z1, scale * z2];
            scale *= g;
            zi
        })
        .collect()
}

/// Runs the cascade in place (transposed direct form II), each section
/// starting from `zi * x[0]`.
fn run_cascade(sections: &[Biquad], zi: &[[f64; 2]], x: &mut [f64]) {
    let x0 = x[0];
    for (s, z) in sections.iter().zip(zi) {
        let (mut z1, mut z2) = (z[0] * x0, z[1] * x0);
        for v in x.iter_mut() {
            let input = *v;
            let y = s.b0 * input + z1;
            z1 = s.b1 * input - s.a1 * y + z2;
            z2 = s.b2 * input - s.a2 * y;
            *v = y;
        }
    }
}

/// Forward-backward filtering with odd-reflection edge padding.
///
/// The effective response is `|H|^2` with zero phase. Each pass starts from
/// the steady state for the first padded sample, which removes the start-up
/// transient for constant offsets.
pub fn apply_zero_phase(filter: &BiquadCascade, signal: &[f64]) -> Result<Vec<f64>, DspError> {
    let pad = pad_length(filter);
    let n = signal.len();
    if n <= pad {
        return Err(DspError::SignalTooShort { len: n, pad });
    }
    let mut ext = Vec::with_capacity(n + 2 * pad);
    let (first, last) = (signal[0], signal[n - 1]);
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - signal[i]));
    ext.extend_from_slice(signal);
    ext.extend((1..=pad).map(|i| 2.0 * last - signal[n - 1 - i]));

    let zi = step_states(filter.sections());
    run_cascade(filter.sections(), &zi, &mut ext);
    ext.reverse();
    run_cascade(filter.sections(), &zi, &mut ext);
    ext.reverse();
    Ok(ext[pad..pad + n].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{design_butterworth, design_notch, FilterKind};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sine(freq: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin()).collect()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn too_short_signal() {
        let f = design_butterworth(4, FilterKind::Lowpass, &[5.0], 100.0).unwrap();
        assert_eq!(pad_length(&f), 12);
        assert!(matches!(
            apply_zero_phase(&f, &[0.0; 12]),
            Err(DspError::SignalTooShort { len: 12, pad: 12 })
        ));
        assert!(apply_zero_phase(&f, &[0.0; 13]).is_ok());
    }

    #[test]
    fn zero_in_zero_out() {
        let f = design_butterworth(4, FilterKind::Highpass, &[0.6], 1000.0).unwrap();
        assert!(apply_zero_phase(&f, &vec![0.0; 500]).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn passband_sine_has_zero_lag() {
        let fs = 1000.0;
        let f = design_butterworth(4, FilterKind::Lowpass, &[5.0], fs).unwrap();
        let x = sine(1.0, fs, 10_000);
        let y = apply_zero_phase(&f, &x).unwrap();
        let mid = 2000..8000;
        let xcorr = |lag: i64| -> f64 {
            mid.clone()
                .map(|i| x[i] * y[(i as i64 + lag) as usize])
                .sum::<f64>()
        };
        let best = (-50..=50).max_by(|a, b| xcorr(*a).total_cmp(&xcorr(*b))).unwrap();
        assert_eq!(best, 0);
    }

    #[test]
    fn notch_removes_mains() {
        let fs = 1000.0;
        let f = design_notch(50.0, 30.0, fs).unwrap();
        let x = sine(50.0, fs, 10_000);
        let y = apply_zero_phase(&f, &x).unwrap();
        let core = 2000..8000;
        assert!(rms(&y[core.clone()]) <= 0.01 * rms(&x[core]));
    }

    #[test]
    fn impulse_response_is_symmetric() {
        let f = design_butterworth(4, FilterKind::Lowpass, &[50.0], 1000.0).unwrap();
        let mut x = vec![0.0; 2001];
        x[1000] = 1.0;
        let y = apply_zero_phase(&f, &x).unwrap();
        for k in 1..1000 {
            assert!((y[1000 - k] - y[1000 + k]).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn constant_offset_passes_lowpass_unchanged() {
        let f = design_butterworth(4, FilterKind::Lowpass, &[5.0], 1000.0).unwrap();
        let y = apply_zero_phase(&f, &vec![3.5; 400]).unwrap();
        assert!(y.iter().all(|v| (v - 3.5).abs() < 1e-9));
    }

    proptest! {
        #[test]
        fn linearity(
            xs in proptest::collection::vec(-10.0f64..10.0, 64),
            ys in proptest::collection::vec(-10.0f64..10.0, 64),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let f = design_butterworth(4, FilterKind::Bandpass, &[2.0, 20.0], 100.0).unwrap();
            let combo: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * x + b * y).collect();
            let lhs = apply_zero_phase(&f, &combo).unwrap();
            let fx = apply_zero_phase(&f, &xs).unwrap();
            let fy = apply_zero_phase(&f, &ys).unwrap();
            let scale = lhs.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for i in 0..64 {
                let rhs = a * fx[i] + b * fy[i];
                prop_assert!((lhs[i] - rhs).abs() <= 1e-9 * scale);
            }
        }
    }
}
