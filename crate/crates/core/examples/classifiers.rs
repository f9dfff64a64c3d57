//! Trains the three classifiers on a small two-class Gaussian problem,
//! reports held-out accuracy and per-class scores, and round-trips the SVM
//! through its JSON artifact.
//!
//! Usage: cargo run --example classifiers

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use startle_surprise::models::{GbtParams, Hyperparams, Kernel, ModelArtifact, SvmParams, TrainedModel};
use startle_surprise::ClassLabel;

fn blobs(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<ClassLabel>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let (label, cx) = if i % 2 == 0 { (ClassLabel::Startle, 1.2) } else { (ClassLabel::Surprise, -1.2) };
        x.push(vec![cx + noise.sample(&mut rng), 0.5 * cx + noise.sample(&mut rng)]);
        y.push(label);
    }
    (x, y)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let classes = [ClassLabel::Startle, ClassLabel::Surprise];
    let (x_train, y_train) = blobs(60, 1);
    let (x_test, y_test) = blobs(200, 2);

    let candidates = [
        Hyperparams::Svm(SvmParams::new(1.0, Kernel::Linear)),
        Hyperparams::Svm(SvmParams::new(1.0, Kernel::Rbf { gamma: 0.5 })),
        Hyperparams::NaiveBayes,
        Hyperparams::Gbt(GbtParams { n_rounds: 50, eta: 0.1, max_depth: 2, ..GbtParams::default() }),
    ];
    for params in &candidates {
        let model = TrainedModel::fit(params, &x_train, &y_train, &classes)?;
        let hits = x_test
            .iter()
            .zip(&y_test)
            .filter(|(x, y)| model.predict(x).label == **y)
            .count();
        let p = model.predict(&[0.3, 0.1]);
        println!(
            "{:<12} {:<32} accuracy {:.3}   scores at (0.3, 0.1): {:?}",
            params.kind().name(),
            params.to_string(),
            hits as f64 / x_test.len() as f64,
            p.scores
        );
    }

    let params = candidates[0];
    let artifact = ModelArtifact::new(params, TrainedModel::fit(&params, &x_train, &y_train, &classes)?);
    let json = artifact.to_json();
    let back = ModelArtifact::from_json(&json)?;
    println!("\nartifact: {} bytes of JSON, round trip exact: {}", json.len(), back == artifact);
    Ok(())
}
