use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvalError;

/// Percentile bootstrap interval for the mean of a 0/1 correctness vector.
///
/// Draws `n_boot` resamples with replacement and returns the nearest-rank
/// `alpha/2` and `1 - alpha/2` percentiles of the resampled means.
pub fn bootstrap_ci(
    correct: &[f64],
    n_boot: usize,
    alpha: f64,
    seed: u64,
) -> Result<(f64, f64), EvalError> {
    if correct.is_empty() {
        return Err(EvalError::EmptyVector);
    }
    if n_boot == 0 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(EvalError::InvalidConfig(format!(
            "bootstrap needs n_boot > 0 and alpha in (0, 1), got {n_boot} and {alpha}"
        )));
    }
    let n = correct.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..n_boot)
        .map(|_| (0..n).map(|_| correct[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_unstable_by(f64::total_cmp);
    let rank = |q: f64| {
        let r = (q * n_boot as f64).ceil() as usize;
        means[r.clamp(1, n_boot) - 1]
    };
    Ok((rank(alpha / 2.0), rank(1.0 - alpha / 2.0)))
}
