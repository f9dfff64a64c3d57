use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Biquad, BiquadCascade, DesignMeta, DspError, FilterKind};

/// Analog biquad `(n2 s^2 + n1 s + n0) / (d2 s^2 + d1 s + d0)` mapped through
/// `s = 2 fs (z - 1) / (z + 1)`.
fn bilinear(num: [f64; 3], den: [f64; 3], fs: f64) -> Biquad {
    let c = 2.0 * fs;
    let c2 = c * c;
    let map = |p: [f64; 3]| {
        [
            p[0] * c2 + p[1] * c + p[2],
            -2.0 * p[0] * c2 + 2.0 * p[2],
            p[0] * c2 - p[1] * c + p[2],
        ]
    };
    let n = map(num);
    let d = map(den);
    Biquad {
        b0: n[0] / d[0],
        b1: n[1] / d[0],
        b2: n[2] / d[0],
        a1: d[1] / d[0],
        a2: d[2] / d[0],
    }
}

fn section_response(s: &Biquad, omega: f64) -> Complex64 {
    let z1 = Complex64::from_polar(1.0, -omega);
    let z2 = z1 * z1;
    (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2)
}

/// Complex response of the cascade at each frequency (Hz), evaluated on the
/// unit circle as the product of the section responses. Frequencies are
/// expected in `[0, fs/2)`.
pub fn frequency_response(filter: &BiquadCascade, freqs_hz: &[f64]) -> Vec<Complex64> {
    let fs = filter.fs_hz();
    freqs_hz
        .iter()
        .map(|&f| {
            let omega = 2.0 * PI * f / fs;
            filter
                .sections()
                .iter()
                .map(|s| section_response(s, omega))
                .product()
        })
        .collect()
}

fn check_rate(fs_hz: f64) -> Result<(), DspError> {
    if fs_hz > 0.0 && fs_hz.is_finite() {
        Ok(())
    } else {
        Err(DspError::BadSampleRate(fs_hz))
    }
}

fn check_cutoff(f: f64, fs_hz: f64) -> Result<(), DspError> {
    if !(f > 0.0) {
        return Err(DspError::NonPositiveCutoff(f));
    }
    if f >= fs_hz / 2.0 {
        return Err(DspError::CutoffAboveNyquist {
            cutoff_hz: f,
            nyquist_hz: fs_hz / 2.0,
        });
    }
    Ok(())
}

/// Pole angles of the analog Butterworth prototype's upper-half-plane
/// poles, ordered from the lowest-Q pair to the highest-Q pair.
fn prototype_poles(order: usize) -> Vec<Complex64> {
    (1..=order / 2)
        .rev()
        .map(|k| {
            let theta = PI * (2 * k - 1) as f64 / (2 * order) as f64;
            Complex64::new(-theta.sin(), theta.cos())
        })
        .collect()
}

fn pole_q(p: Complex64) -> f64 {
    p.norm() / (2.0 * -p.re)
}

/// Butterworth low-, high- or band-pass design.
///
/// `order` is the order of the lowpass prototype. Low- and high-pass designs
/// yield `order / 2` sections; a band-pass yields `order` sections (twice the
/// prototype order in poles). Sections are sorted by ascending pole Q.
pub fn design_butterworth(
    order: usize,
    kind: FilterKind,
    cutoffs_hz: &[f64],
    fs_hz: f64,
) -> Result<BiquadCascade, DspError> {
    check_rate(fs_hz)?;
    if order % 2 == 1 {
        return Err(DspError::OddOrder(order));
    }
    if !matches!(order, 2 | 4 | 6 | 8) {
        return Err(DspError::UnsupportedOrder(order));
    }
    let c = 2.0 * fs_hz;
    let prewarp = |f: f64| c * (PI * f / fs_hz).tan();

    let sections = match kind {
        FilterKind::Lowpass | FilterKind::Highpass => {
            let [fc] = cutoffs_hz else {
                return Err(DspError::InvalidBand(format!(
                    "expected one cutoff, got {}",
                    cutoffs_hz.len()
                )));
            };
            check_cutoff(*fc, fs_hz)?;
            let w = prewarp(*fc);
            prototype_poles(order)
                .into_iter()
                .map(|p| {
                    let q = pole_q(p);
                    let den = [1.0, w / q, w * w];
                    let num = if kind == FilterKind::Lowpass {
                        [0.0, 0.0, w * w]
                    } else {
                        [1.0, 0.0, 0.0]
                    };
                    bilinear(num, den, fs_hz)
                })
                .collect::<Vec<_>>()
        }
        FilterKind::Bandpass => {
            let [lo, hi] = cutoffs_hz else {
                return Err(DspError::InvalidBand(format!(
                    "expected two cutoffs, got {}",
                    cutoffs_hz.len()
                )));
            };
            check_cutoff(*lo, fs_hz)?;
            check_cutoff(*hi, fs_hz)?;
            if lo >= hi {
                return Err(DspError::InvalidBand(format!("low {lo} Hz >= high {hi} Hz")));
            }
            let (w1, w2) = (prewarp(*lo), prewarp(*hi));
            let bw = w2 - w1;
            let w0sq = w1 * w2;
            // Each prototype pole p splits into (p B ± sqrt(p² B² - 4 w0²)) / 2.
            let mut poles: Vec<Complex64> = Vec::with_capacity(order);
            for p in prototype_poles(order) {
                let pb = p * bw;
                let root = (pb * pb - 4.0 * w0sq).sqrt();
                for s in [(pb + root) / 2.0, (pb - root) / 2.0] {
                    // keep the upper-half-plane member of each conjugate pair
                    poles.push(if s.im >= 0.0 { s } else { s.conj() });
                }
            }
            poles.sort_by(|a, b| pole_q(*a).total_cmp(&pole_q(*b)));
            let center = 2.0 * (w0sq.sqrt() / c).atan();
            poles
                .into_iter()
                .map(|s| {
                    let den = [1.0, -2.0 * s.re, s.norm_sqr()];
                    let mut sec = bilinear([0.0, bw, 0.0], den, fs_hz);
                    let g = section_response(&sec, center).norm();
                    sec.b0 /= g;
                    sec.b1 /= g;
                    sec.b2 /= g;
                    sec
                })
                .collect()
        }
        FilterKind::Notch => {
            return Err(DspError::InvalidBand(
                "notch filters are built by design_notch".into(),
            ))
        }
    };

    Ok(BiquadCascade::new(
        sections,
        DesignMeta {
            kind,
            order,
            cutoffs_hz: cutoffs_hz.to_vec(),
            fs_hz,
            q: None,
        },
    ))
}

/// Second-order notch with zeros on the unit circle at `±center_hz` and unit
/// gain at DC. The -3 dB bandwidth is `center_hz / q`.
pub fn design_notch(center_hz: f64, q: f64, fs_hz: f64) -> Result<BiquadCascade, DspError> {
    check_rate(fs_hz)?;
    check_cutoff(center_hz, fs_hz)?;
    if !(q > 0.0 && q.is_finite()) {
        return Err(DspError::NonPositiveQ(q));
    }
    let w0 = 2.0 * PI * center_hz / fs_hz;
    let alpha = w0.sin() / (2.0 * q);
    let cos = w0.cos();
    let a0 = 1.0 + alpha;
    let section = Biquad {
        b0: 1.0 / a0,
        b1: -2.0 * cos / a0,
        b2: 1.0 / a0,
        a1: -2.0 * cos / a0,
        a2: (1.0 - alpha) / a0,
    };
    Ok(BiquadCascade::new(
        vec![section],
        DesignMeta {
            kind: FilterKind::Notch,
            order: 2,
            cutoffs_hz: vec![center_hz],
            fs_hz,
            q: Some(q),
        },
    ))
}
