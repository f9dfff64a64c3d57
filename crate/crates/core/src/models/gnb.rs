//! Gaussian naive Bayes.

use serde::{Deserialize, Serialize};

use super::{check_training_set, Prediction, ModelError};
use crate::types::ClassLabel;

/// Relative variance floor: `1e-9` times the largest feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    pub classes: Vec<ClassLabel>,
    pub log_priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

fn column_variance(rows: &[&Vec<f64>], j: usize) -> f64 {
    let n = rows.len() as f64;
    let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
    rows.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n
}

pub fn train_gnb(
    x: &[Vec<f64>],
    y: &[ClassLabel],
    classes: &[ClassLabel],
) -> Result<GnbModel, ModelError> {
    let d = check_training_set(x, y, classes)?;
    let all: Vec<&Vec<f64>> = x.iter().collect();
    let max_var = (0..d).map(|j| column_variance(&all, j)).fold(0.0, f64::max);
    let floor = if max_var > 0.0 { VAR_SMOOTHING * max_var } else { VAR_SMOOTHING };

    let mut log_priors = Vec::new();
    let mut means = Vec::new();
    let mut variances = Vec::new();
    for &c in classes {
        let rows: Vec<&Vec<f64>> = x.iter().zip(y).filter(|(_, l)| **l == c).map(|(r, _)| r).collect();
        let n = rows.len() as f64;
        log_priors.push((n / x.len() as f64).ln());
        means.push((0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect());
        variances.push((0..d).map(|j| column_variance(&rows, j).max(floor)).collect());
    }
    Ok(GnbModel {
        classes: classes.to_vec(),
        log_priors,
        means,
        variances,
    })
}

impl GnbModel {
    /// Unnormalized log posterior per class.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        (0..self.classes.len())
            .map(|c| {
                let ll: f64 = x
                    .iter()
                    .zip(self.means[c].iter().zip(&self.variances[c]))
                    .map(|(v, (m, var))| {
                        -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (v - m) * (v - m) / (2.0 * var)
                    })
                    .sum();
                self.log_priors[c] + ll
            })
            .collect()
    }

    /// Replaces the priors (normalized internally).
    pub fn with_priors(mut self, priors: &[f64]) -> Self {
        let total: f64 = priors.iter().sum();
        self.log_priors = priors.iter().map(|p| (p / total).ln()).collect();
        self
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        let jll = self.joint_log_likelihood(x);
        let max = jll.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = jll.iter().map(|v| (v - max).exp()).collect();
        let total: f64 = exp.iter().sum();
        let posterior: Vec<f64> = exp.iter().map(|v| v / total).collect();
        Prediction::from_scores(&self.classes, posterior)
    }
}

pub fn predict_gnb(model: &GnbModel, x: &[f64]) -> Prediction {
    model.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use ClassLabel::{Startle as A, Surprise as B};

    fn rows(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|x| vec![*x]).collect()
    }

    #[test]
    fn separated_classes() {
        let x = rows(&[-0.1, 0.0, 0.1, 4.9, 5.0, 5.1]);
        let y = [A, A, A, B, B, B];
        let m = train_gnb(&x, &y, &[A, B]).unwrap();
        let p = m.predict(&[0.05]);
        assert_eq!(p.label, A);
        assert!(p.score(A).unwrap() > 0.999);
    }

    #[test]
    fn symmetric_tie_breaks_low() {
        let x = rows(&[0.0, 1.0, 4.0, 5.0]);
        let y = [B, B, A, A];
        let m = train_gnb(&x, &y, &[A, B]).unwrap();
        let p = m.predict(&[2.5]);
        assert!((p.score(A).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(p.label, A);
    }

    #[test]
    fn zero_variance_is_floored() {
        let x = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![2.0, 5.0], vec![2.0, 7.0]];
        let y = [A, A, B, B];
        let m = train_gnb(&x, &y, &[A, B]).unwrap();
        assert!(m.variances.iter().flatten().all(|v| *v > 0.0));
        let p = m.predict(&[1.5, 3.0]);
        assert!(p.scores.iter().all(|(_, s)| s.is_finite()));
    }

    #[test]
    fn missing_class() {
        let x = rows(&[0.0, 1.0]);
        assert_eq!(
            train_gnb(&x, &[A, A], &[A, B]),
            Err(ModelError::ClassAbsent(B))
        );
    }

    proptest! {
        #[test]
        fn posteriors_normalized_and_monotone_in_prior(
            xs in proptest::collection::vec(-5.0f64..5.0, 6),
            q in -8.0f64..8.0,
            boost in 1.0f64..10.0,
        ) {
            let x = rows(&xs);
            let y = [A, A, A, B, B, B];
            let m = train_gnb(&x, &y, &[A, B]).unwrap();
            let p = m.predict(&[q]);
            let total: f64 = p.scores.iter().map(|(_, s)| s).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            let boosted = m.clone().with_priors(&[0.5 * boost, 0.5]).predict(&[q]);
            prop_assert!(boosted.score(A).unwrap() >= p.score(A).unwrap() - 1e-12);
        }
    }
}
