use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::types::ClassLabel;

/// Smallest class size accepted by [`split_train_test`].
pub const MIN_CLASS_SIZE: usize = 5;

fn class_groups(labels: &[ClassLabel]) -> Vec<(ClassLabel, Vec<usize>)> {
    let mut groups: Vec<(ClassLabel, Vec<usize>)> = Vec::new();
    for class in ClassLabel::ALL {
        let idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if !idx.is_empty() {
            groups.push((class, idx));
        }
    }
    groups
}

/// Stratified shuffle split. Each class contributes
/// `max(1, round((1 - train_ratio) * n_c))` test indices. Both returned index
/// lists are sorted.
pub fn split_train_test(
    labels: &[ClassLabel],
    train_ratio: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(EvalError::InvalidConfig(format!(
            "train ratio {train_ratio} outside (0, 1)"
        )));
    }
    let groups = class_groups(labels);
    for (label, idx) in &groups {
        if idx.len() < MIN_CLASS_SIZE {
            return Err(EvalError::ClassTooSmall {
                label: *label,
                count: idx.len(),
                min: MIN_CLASS_SIZE,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (_, mut idx) in groups {
        idx.shuffle(&mut rng);
        let n_test = (((1.0 - train_ratio) * idx.len() as f64).round() as usize).max(1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified k-fold assignment: returns k sorted validation index lists.
///
/// Each class is shuffled and dealt round robin; the dealing position carries
/// over from one class to the next so that fold sizes differ by at most one.
pub fn kfold(labels: &[ClassLabel], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidConfig(format!("k = {k} folds, need at least 2")));
    }
    let groups = class_groups(labels);
    for (label, idx) in &groups {
        if idx.len() < k {
            return Err(EvalError::ClassSmallerThanK {
                label: *label,
                count: idx.len(),
                k,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut pos = 0;
    for (_, mut idx) in groups {
        idx.shuffle(&mut rng);
        for i in idx {
            folds[pos % k].push(i);
            pos += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}
