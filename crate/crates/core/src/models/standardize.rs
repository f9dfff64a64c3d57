use serde::{Deserialize, Serialize};

use super::ModelError;

/// Floor applied to a column's standard deviation before dividing.
pub const STD_FLOOR: f64 = 1e-8;

/// Per-column z-scoring fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn fit_standardizer(x: &[Vec<f64>]) -> Result<Standardizer, ModelError> {
    let n = x.len();
    if n == 0 || x[0].is_empty() {
        return Err(ModelError::EmptyMatrix);
    }
    if n < 2 {
        return Err(ModelError::TooFewRows(n));
    }
    let d = x[0].len();
    if let Some(row) = x.iter().position(|r| r.len() != d) {
        return Err(ModelError::DimensionMismatch { row, expected: d });
    }
    let mut mean = vec![0.0; d];
    for row in x {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; d];
    for row in x {
        for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let std = var
        .into_iter()
        .map(|s| (s / n as f64).sqrt().max(STD_FLOOR))
        .collect();
    Ok(Standardizer { mean, std })
}

impl Standardizer {
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }
}

/// Convenience wrapper matching the fit/apply pair.
pub fn apply_standardizer(s: &Standardizer, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    s.transform(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_point_column() {
        let x = vec![vec![1.0], vec![3.0]];
        let s = fit_standardizer(&x).unwrap();
        assert_eq!(apply_standardizer(&s, &x), vec![vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn constant_column_goes_to_zero() {
        let x = vec![vec![4.0, 1.0], vec![4.0, 2.0], vec![4.0, 3.0]];
        let s = fit_standardizer(&x).unwrap();
        assert_eq!(s.std[0], STD_FLOOR);
        assert!(s.transform(&x).iter().all(|r| r[0] == 0.0));
    }

    #[test]
    fn unseen_row_uses_training_moments() {
        let x = vec![vec![0.0], vec![2.0], vec![4.0], vec![6.0]];
        let s = fit_standardizer(&x).unwrap();
        // mean 3, population std sqrt(5)
        let got = s.transform_row(&[10.0])[0];
        assert!((got - 7.0 / 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(fit_standardizer(&[]), Err(ModelError::EmptyMatrix));
        assert_eq!(fit_standardizer(&[vec![1.0]]), Err(ModelError::TooFewRows(1)));
        assert!(matches!(
            fit_standardizer(&[vec![1.0], vec![1.0, 2.0]]),
            Err(ModelError::DimensionMismatch { row: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn training_columns_are_unit(rows in proptest::collection::vec(
            proptest::collection::vec(-1e3f64..1e3, 3), 2..30)) {
            let s = fit_standardizer(&rows).unwrap();
            let z = s.transform(&rows);
            for j in 0..3 {
                let n = z.len() as f64;
                let m = z.iter().map(|r| r[j]).sum::<f64>() / n;
                let v = z.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n;
                prop_assert!(m.abs() < 1e-9);
                if s.std[j] > 1e-6 {
                    prop_assert!((v.sqrt() - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
