//! Stratified 80:20 split, 5-fold grid search on the training part, then a
//! bootstrap interval for the held-out accuracy. Runs on EDA features of the
//! synthetic benchmark for the startle vs surprise comparison.
//!
//! Usage: cargo run --release --example cross_validation

use startle_surprise::dsp::{preprocess_recording, PreprocessConfig};
use startle_surprise::epoch::{balance_baseline, build_dataset, EpochingConfig, DEFAULT_BASELINE_GUARD_S};
use startle_surprise::eval::{bootstrap_ci, featurize, grid_search, split_train_test};
use startle_surprise::models::{GridSpec, ModelKind, TrainedModel};
use startle_surprise::synth::{synth_benchmark, EffectParams, RecordingSpec};
use startle_surprise::{ChannelKind, ClassLabel, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let recordings = synth_benchmark(17, &RecordingSpec::default(), 3, &EffectParams::default())?
        .iter()
        .map(|r| preprocess_recording(r, &PreprocessConfig::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = EpochingConfig::new(Window::S5, DEFAULT_BASELINE_GUARD_S)?;
    let data = featurize(&balance_baseline(build_dataset(&recordings, &cfg)?))?;

    let classes = [ClassLabel::Startle, ClassLabel::Surprise];
    let rows: Vec<_> = data.iter().filter(|d| classes.contains(&d.label)).collect();
    let x: Vec<Vec<f64>> = rows
        .iter()
        .map(|d| d.features.select(ChannelKind::Eda).unwrap().values().to_vec())
        .collect();
    let y: Vec<ClassLabel> = rows.iter().map(|d| d.label).collect();

    let (train, test) = split_train_test(&y, 0.8, 5)?;
    println!("{} samples: {} train, {} test", y.len(), train.len(), test.len());
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<ClassLabel>) {
        (idx.iter().map(|&i| x[i].clone()).collect(), idx.iter().map(|&i| y[i]).collect())
    };
    let (x_tr, y_tr) = pick(&train);
    let (x_te, y_te) = pick(&test);

    for kind in ModelKind::ALL {
        let grid = GridSpec::default().grid(kind);
        let result = grid_search(&grid, &x_tr, &y_tr, &classes, 5, 6)?;
        let model = TrainedModel::fit(&result.best, &x_tr, &y_tr, &classes)?;
        let correct: Vec<f64> = x_te
            .iter()
            .zip(&y_te)
            .map(|(x, y)| f64::from(u8::from(model.predict(x).label == *y)))
            .collect();
        let acc = correct.iter().sum::<f64>() / correct.len() as f64;
        let (lo, hi) = bootstrap_ci(&correct, 10_000, 0.05, 7)?;
        println!(
            "{:<12} best of {:>2}: {:<34} cv {:.3}  test {:.3} [{:.3}, {:.3}]",
            kind.name(),
            grid.len(),
            result.best.to_string(),
            result.cv_accuracy[result.best_index],
            acc,
            lo,
            hi
        );
    }
    Ok(())
}
