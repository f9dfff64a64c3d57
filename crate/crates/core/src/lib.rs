//! Physiological-signal pipeline for telling startle, surprise and baseline
//! states apart from ECG, EDA, PPG and respiration recordings.

pub mod cli;
pub mod dsp;
pub mod eval;
pub mod epoch;
pub mod features;
pub mod ingest;
pub mod models;
pub mod synth;
pub mod types;

pub use types::*;
