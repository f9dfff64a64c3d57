use super::{kfold, EvalError};
use crate::models::{Hyperparams, TrainedModel};
use crate::types::ClassLabel;

/// Outcome of a grid search: the winning entry and the mean validation
/// accuracy of every entry, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: Hyperparams,
    pub best_index: usize,
    pub cv_accuracy: Vec<f64>,
}

fn take<T: Clone>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i].clone()).collect()
}

/// Mean accuracy over the given validation folds. `on_fit` receives the
/// row indices each model is fitted on.
pub fn cross_val_accuracy(
    params: &Hyperparams,
    x: &[Vec<f64>],
    y: &[ClassLabel],
    classes: &[ClassLabel],
    folds: &[Vec<usize>],
    on_fit: &(dyn Fn(&[usize]) + Sync),
) -> Result<f64, EvalError> {
    let mut total = 0.0;
    for val in folds {
        let fit: Vec<usize> = (0..x.len()).filter(|i| val.binary_search(i).is_err()).collect();
        on_fit(&fit);
        let model = TrainedModel::fit(params, &take(x, &fit), &take(y, &fit), classes)?;
        let hits = val
            .iter()
            .filter(|&&i| model.predict(&x[i]).label == y[i])
            .count();
        total += hits as f64 / val.len() as f64;
    }
    Ok(total / folds.len() as f64)
}

/// Stratified k-fold grid search. The best mean validation accuracy wins;
/// ties go to the earlier grid entry.
pub fn grid_search(
    grid: &[Hyperparams],
    x: &[Vec<f64>],
    y: &[ClassLabel],
    classes: &[ClassLabel],
    k: usize,
    seed: u64,
) -> Result<GridResult, EvalError> {
    grid_search_observed(grid, x, y, classes, k, seed, &|_| {})
}

pub(crate) fn grid_search_observed(
    grid: &[Hyperparams],
    x: &[Vec<f64>],
    y: &[ClassLabel],
    classes: &[ClassLabel],
    k: usize,
    seed: u64,
    on_fit: &(dyn Fn(&[usize]) + Sync),
) -> Result<GridResult, EvalError> {
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let folds = kfold(y, k, seed)?;
    let mut cv_accuracy = Vec::with_capacity(grid.len());
    let mut best_index = 0;
    for (i, params) in grid.iter().enumerate() {
        let acc = cross_val_accuracy(params, x, y, classes, &folds, on_fit)?;
        if acc > cv_accuracy.get(best_index).copied().unwrap_or(f64::NEG_INFINITY) {
            best_index = i;
        }
        cv_accuracy.push(acc);
    }
    Ok(GridResult {
        best: grid[best_index],
        best_index,
        cv_accuracy,
    })
}
