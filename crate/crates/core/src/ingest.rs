//! CSV readers and writers for recordings, annotations and feature tables.
//!
//! Recording files carry the header `t_s,ecg,eda,ppg,resp` and one row per
//! sample. The sample rate is inferred from the median time step unless an
//! override is given. Annotation files carry `onset_s,label` with labels
//! `startle` or `surprise` (case-insensitive); onsets are seconds from the
//! first sample.
//!
//! Line numbers in errors are 1-based and count the header as line 1.

use std::io::Read;

use thiserror::Error;

use crate::types::{
    ChannelKind, ClassLabel, EventAnnotation, FeatureDescriptor, FeatureVector, InvariantError,
    RawRecording,
};

/// Sample rate assumed by the synthetic generator and the CLI when none is
/// configured.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 1000.0;

/// Maximum relative deviation of any time step from the median step.
pub const SAMPLING_TOLERANCE: f64 = 0.01;

const RECORDING_COLUMNS: [&str; 5] = ["t_s", "ecg", "eda", "ppg", "resp"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: time is not strictly increasing")]
    NonMonotonicTime { line: u64 },
    #[error("line {line}: time step deviates more than 1% from the median step")]
    NonUniformSampling { line: u64 },
    #[error("line {line}: non-finite sample in column `{column}`")]
    NonFiniteSample { line: u64, column: String },
    #[error("line {line}: cannot parse `{value}` in column `{column}` as a number")]
    BadNumber {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unknown label `{label}`")]
    UnknownLabel { line: u64, label: String },
    #[error("line {line}: onset {onset_s} s outside recording span [0, {duration_s}) s")]
    OnsetOutOfRange {
        line: u64,
        onset_s: f64,
        duration_s: f64,
    },
    #[error("sample rate override must be positive, got {0}")]
    BadOverride(f64),
    #[error("feature vectors do not share one layout (row {row})")]
    MixedLayout { row: usize },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_field(
    record: &csv::StringRecord,
    idx: usize,
    column: &str,
) -> Result<f64, IngestError> {
    let line = line_of(record);
    let raw = record.get(idx).unwrap_or("");
    raw.parse::<f64>().map_err(|_| IngestError::BadNumber {
        line,
        column: column.to_string(),
        value: raw.to_string(),
    })
}

fn column_indices<const N: usize>(
    headers: &csv::StringRecord,
    names: [&str; N],
) -> Result<[usize; N], IngestError> {
    let mut out = [0usize; N];
    for (slot, name) in out.iter_mut().zip(names) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))?;
    }
    Ok(out)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Parses a recording file. The participant id is left empty; set it with
/// [`RawRecording::with_participant_id`].
pub fn parse_recording<R: Read>(
    input: R,
    fs_override: Option<f64>,
) -> Result<RawRecording, IngestError> {
    if let Some(fs) = fs_override {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(IngestError::BadOverride(fs));
        }
    }
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let idx = column_indices(&headers, RECORDING_COLUMNS)?;

    let mut times = Vec::new();
    let mut lines = Vec::new();
    let mut channels: [Vec<f64>; 4] = Default::default();
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        let line = line_of(&record);
        if record.len() < headers.len() {
            return Err(IngestError::FieldCount {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let t = parse_field(&record, idx[0], "t_s")?;
        if !t.is_finite() {
            return Err(IngestError::NonFiniteSample {
                line,
                column: "t_s".into(),
            });
        }
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(IngestError::NonMonotonicTime { line });
            }
        }
        for kind in ChannelKind::ALL {
            let col = RECORDING_COLUMNS[kind.index() + 1];
            let v = parse_field(&record, idx[kind.index() + 1], col)?;
            if !v.is_finite() {
                return Err(IngestError::NonFiniteSample {
                    line,
                    column: col.into(),
                });
            }
            channels[kind.index()].push(v);
        }
        times.push(t);
        lines.push(line);
    }
    if times.len() < 2 {
        return Err(InvariantError::TooFewSamples(times.len()).into());
    }

    let steps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let med = median(&mut steps.clone());
    for (i, dt) in steps.iter().enumerate() {
        if ((dt - med) / med).abs() > SAMPLING_TOLERANCE {
            return Err(IngestError::NonUniformSampling { line: lines[i + 1] });
        }
    }
    let fs = fs_override.unwrap_or(1.0 / med);
    Ok(RawRecording::new("", fs, channels, Vec::new())?)
}

/// Parses an annotation file against the recording it belongs to. The
/// result is sorted by onset.
pub fn parse_annotations<R: Read>(
    input: R,
    recording: &RawRecording,
) -> Result<Vec<EventAnnotation>, IngestError> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let [onset_idx, label_idx] = column_indices(&headers, ["onset_s", "label"])?;
    let duration_s = recording.duration_s();

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let onset_s = parse_field(&record, onset_idx, "onset_s")?;
        let raw_label = record.get(label_idx).unwrap_or("");
        let label = match raw_label.parse::<ClassLabel>() {
            Ok(l @ (ClassLabel::Startle | ClassLabel::Surprise)) => l,
            _ => {
                return Err(IngestError::UnknownLabel {
                    line,
                    label: raw_label.to_string(),
                })
            }
        };
        if !(onset_s >= 0.0 && onset_s < duration_s) {
            return Err(IngestError::OnsetOutOfRange {
                line,
                onset_s,
                duration_s,
            });
        }
        out.push(EventAnnotation { onset_s, label });
    }
    out.sort_by(|a, b| a.onset_s.total_cmp(&b.onset_s));
    Ok(out)
}

/// Writes a recording in the format read by [`parse_recording`]. Values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_recording(recording: &RawRecording) -> String {
    use std::fmt::Write;
    let n = recording.n_samples();
    let fs = recording.sample_rate_hz();
    let mut out = String::with_capacity(n * 48);
    out.push_str("t_s,ecg,eda,ppg,resp\n");
    let ch = recording.channels();
    for i in 0..n {
        let t = i as f64 / fs;
        let _ = writeln!(out, "{},{},{},{},{}", t, ch[0][i], ch[1][i], ch[2][i], ch[3][i]);
    }
    out
}

pub fn write_annotations(annotations: &[EventAnnotation]) -> String {
    let mut out = String::from("onset_s,label\n");
    for a in annotations {
        out.push_str(&format!("{},{}\n", a.onset_s, a.label));
    }
    out
}

/// Formats a value with 17 significant digits, enough to recover any `f64`.
fn format_17(v: f64) -> String {
    format!("{:.16e}", v)
}

/// Writes a feature table: one column per (channel, feature) followed by
/// `label`. An empty dataset produces a header containing only `label`.
pub fn write_feature_table(
    dataset: &[(FeatureVector, ClassLabel)],
) -> Result<String, IngestError> {
    let mut out = String::new();
    let layout = dataset.first().map(|(fv, _)| fv.layout().to_vec()).unwrap_or_default();
    for d in &layout {
        out.push_str(&d.column_name());
        out.push(',');
    }
    out.push_str("label\n");
    for (row, (fv, label)) in dataset.iter().enumerate() {
        if fv.layout() != layout.as_slice() {
            return Err(IngestError::MixedLayout { row });
        }
        for v in fv.values() {
            out.push_str(&format_17(*v));
            out.push(',');
        }
        out.push_str(label.name());
        out.push('\n');
    }
    Ok(out)
}

/// Reads a table written by [`write_feature_table`].
pub fn parse_feature_table<R: Read>(
    input: R,
) -> Result<Vec<(FeatureVector, ClassLabel)>, IngestError> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == "label")
        .ok_or_else(|| IngestError::MissingColumn("label".into()))?;
    let mut layout = Vec::new();
    let mut value_cols = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if i == label_idx {
            continue;
        }
        let d = FeatureDescriptor::parse_column(h)
            .ok_or_else(|| IngestError::MissingColumn(format!("feature column `{h}`")))?;
        layout.push(d);
        value_cols.push((i, h.to_string()));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != headers.len() {
            return Err(IngestError::FieldCount {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let values = value_cols
            .iter()
            .map(|(i, name)| parse_field(&record, *i, name))
            .collect::<Result<Vec<_>, _>>()?;
        let raw_label = record.get(label_idx).unwrap_or("");
        let label = raw_label
            .parse::<ClassLabel>()
            .map_err(|label| IngestError::UnknownLabel { line, label })?;
        out.push((FeatureVector::new(values, layout.clone())?, label));
    }
    Ok(out)
}
