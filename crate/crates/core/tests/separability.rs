//! Pipeline accuracy grows with the synthetic effect size.

use startle_surprise::eval::{run_pipeline, ComparisonTask, ExperimentConfig, PipelineConfig};
use startle_surprise::models::ModelKind;
use startle_surprise::synth::{synth_benchmark, EffectParams, RecordingSpec};
use startle_surprise::Window;

fn mean_accuracy(separability: f64, seed: u64) -> f64 {
    let spec = RecordingSpec { duration_s: 120.0, onset_s: 80.0, fs_hz: 250.0 };
    let params = EffectParams { separability, ..EffectParams::default() };
    let recordings = synth_benchmark(10, &spec, seed, &params).unwrap();
    let cfg = PipelineConfig {
        baseline_guard_s: 20.0,
        experiment: ExperimentConfig {
            windows: vec![Window::S5],
            tasks: vec![ComparisonTask::StartleVsSurprise, ComparisonTask::ThreeClass],
            models: vec![ModelKind::NaiveBayes],
            n_seeds: 3,
            n_boot: 50,
            ..ExperimentConfig::default()
        },
        ..PipelineConfig::default()
    };
    let report = run_pipeline(&recordings, &cfg).unwrap();
    report.cells.iter().map(|c| c.mean_accuracy).sum::<f64>() / report.cells.len() as f64
}

#[test]
fn accuracy_is_monotone_in_separability() {
    let levels = [0.0, 0.5, 1.0, 2.0];
    let acc: Vec<f64> = levels
        .iter()
        .map(|&s| (0..5).map(|seed| mean_accuracy(s, seed)).sum::<f64>() / 5.0)
        .collect();
    for w in acc.windows(2) {
        assert!(w[1] >= w[0], "{acc:?}");
    }
    assert!(acc[0] < 0.6, "{acc:?}");
}
