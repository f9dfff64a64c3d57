//! End-to-end run on a synthetic benchmark: generate 17 startle and 17
//! surprise recordings, preprocess, epoch, featurize and sweep every task,
//! window, signal source and model.
//!
//! Usage: cargo run --release --example synthetic_benchmark [models] [n_seeds] [separability] [seed]
//! where `models` is a comma list such as `svm,naive_bayes,gbt`.

use std::time::Instant;

use startle_surprise::eval::{run_pipeline, ComparisonTask, PipelineConfig, SignalSource};
use startle_surprise::models::ModelKind;
use startle_surprise::synth::{synth_benchmark, EffectParams, RecordingSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let models: Vec<ModelKind> = match args.first() {
        Some(list) => list.split(',').map(|m| m.parse()).collect::<Result<_, _>>()?,
        None => ModelKind::ALL.to_vec(),
    };
    let n_seeds: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(10);
    let separability: f64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(1.0);
    let seed: u64 = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(7);

    let start = Instant::now();
    let params = EffectParams { separability, ..EffectParams::default() };
    let recordings = synth_benchmark(17, &RecordingSpec::default(), seed, &params)?;
    let mut cfg = PipelineConfig::default();
    cfg.experiment.models = models.clone();
    cfg.experiment.n_seeds = n_seeds;
    let report = run_pipeline(&recordings, &cfg)?;

    for task in ComparisonTask::ALL {
        println!("\n{task} (chance {:.3})", task.chance_level());
        print!("{:<8}{:<14}", "window", "model");
        for s in SignalSource::ALL {
            print!("{:>14}", s.name());
        }
        println!();
        for window in [3, 5, 7, 10] {
            for &model in &models {
                print!("{:<8}{:<14}", format!("{window} s"), model.name());
                for s in SignalSource::ALL {
                    let c = report.cell(task, window, s, model).expect("cell present");
                    print!("{:>14.3}", c.mean_accuracy);
                }
                println!();
            }
        }
    }
    println!("\n{} cells in {:.1} s", report.cells.len(), start.elapsed().as_secs_f64());
    Ok(())
}
