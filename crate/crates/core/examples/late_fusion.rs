//! Majority voting across per-modality predictions, including the score
//! tie-break, and the same idea applied to a trained ensemble on the
//! synthetic benchmark (three-class task, 7 s windows).
//!
//! Usage: cargo run --release --example late_fusion

use startle_surprise::dsp::{preprocess_recording, PreprocessConfig};
use startle_surprise::epoch::{balance_baseline, build_dataset, EpochingConfig, DEFAULT_BASELINE_GUARD_S};
use startle_surprise::eval::{featurize, late_fuse, split_train_test};
use startle_surprise::models::{Hyperparams, Prediction, TrainedModel};
use startle_surprise::synth::{synth_benchmark, EffectParams, RecordingSpec};
use startle_surprise::{ChannelKind, ClassLabel, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use ClassLabel::*;
    let two = [Startle, Surprise];
    let vote = |label: ClassLabel, p: f64| Prediction::from_scores(&two, if label == Startle { vec![p, 1.0 - p] } else { vec![1.0 - p, p] });

    let plurality = [vote(Startle, 0.6), vote(Startle, 0.7), vote(Surprise, 0.99), vote(Startle, 0.55)];
    println!("3 startle votes vs 1 surprise -> {}", late_fuse(&plurality)?);
    let tie = [vote(Startle, 0.9), vote(Startle, 0.9), vote(Surprise, 0.6), vote(Surprise, 0.6)];
    println!("2-2 tie, confident startle voters -> {}", late_fuse(&tie)?);

    let recordings = synth_benchmark(17, &RecordingSpec::default(), 4, &EffectParams::default())?
        .iter()
        .map(|r| preprocess_recording(r, &PreprocessConfig::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = EpochingConfig::new(Window::S7, DEFAULT_BASELINE_GUARD_S)?;
    let data = featurize(&balance_baseline(build_dataset(&recordings, &cfg)?))?;
    let labels: Vec<ClassLabel> = data.iter().map(|d| d.label).collect();
    let (train, test) = split_train_test(&labels, 0.8, 1)?;
    let classes = ClassLabel::ALL;

    let mut per_modality = Vec::new();
    for kind in ChannelKind::ALL {
        let x: Vec<Vec<f64>> = data.iter().map(|d| d.features.select(kind).unwrap().values().to_vec()).collect();
        let x_tr: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
        let y_tr: Vec<ClassLabel> = train.iter().map(|&i| labels[i]).collect();
        let model = TrainedModel::fit(&Hyperparams::NaiveBayes, &x_tr, &y_tr, &classes)?;
        let preds: Vec<Prediction> = test.iter().map(|&i| model.predict(&x[i])).collect();
        let acc = test.iter().zip(&preds).filter(|(&i, p)| p.label == labels[i]).count() as f64 / test.len() as f64;
        println!("{:<5} naive Bayes test accuracy {acc:.3}", kind.name());
        per_modality.push(preds);
    }
    let hits = (0..test.len())
        .filter(|&j| {
            let votes: Vec<Prediction> = per_modality.iter().map(|p| p[j].clone()).collect();
            late_fuse(&votes).unwrap() == labels[test[j]]
        })
        .count();
    println!("late fusion test accuracy {:.3}", hits as f64 / test.len() as f64);
    Ok(())
}
