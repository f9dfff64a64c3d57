//! Soft-margin kernel SVM trained by sequential minimal optimization.
//!
//! The solver works on the dual
//!
//! ```text
//! max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
//! s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0
//! ```
//!
//! picking the working pair by maximal violation for the first index and
//! second-order gain for the second, and stops once the largest KKT
//! violation `m(a) - M(a)` drops below `tol`.

use serde::{Deserialize, Serialize};

use super::{check_training_set, ModelError, Prediction};
use crate::types::ClassLabel;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: Kernel,
    pub tol: f64,
    /// Iteration budget in units of `n * n` pair updates.
    pub max_passes: usize,
}

impl SvmParams {
    pub fn new(c: f64, kernel: Kernel) -> Self {
        Self {
            c,
            kernel,
            tol: 1e-3,
            max_passes: 100,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(ModelError::NonPositiveC(self.c));
        }
        if let Kernel::Rbf { gamma } = self.kernel {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(ModelError::InvalidParams(format!("gamma must be positive, got {gamma}")));
            }
        }
        Ok(())
    }
}

/// Raw dual solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision offset: `f(x) = sum a_i y_i K(x_i, x) + bias`.
    pub bias: f64,
    pub iterations: usize,
    /// Final `m(a) - M(a)`; at most `tol` unless the budget ran out.
    pub kkt_gap: f64,
}

/// Dual objective `sum(a) - 1/2 a' Q a` with `Q_ij = y_i y_j K_ij`.
pub fn dual_objective(kernel_matrix: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel_matrix[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// SMO on a precomputed kernel matrix with labels in {-1, +1}.
pub fn solve_smo(
    kernel_matrix: &[Vec<f64>],
    y: &[f64],
    c: f64,
    tol: f64,
    max_iter: usize,
) -> SmoSolution {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * kernel_matrix[i][j];
    let mut alpha = vec![0.0; n];
    // gradient of 1/2 a'Qa - e'a
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let mut gap;

    loop {
        // i: maximal -y_t G_t over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(y[t], alpha[t], c) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            if in_low(y[t], alpha[t], c) {
                gmin = gmin.min(-y[t] * grad[t]);
            }
        }
        gap = gmax - gmin;
        let Some(i) = i_sel else { break };
        if gap < tol || iterations >= max_iter {
            break;
        }
        // j: best second-order decrease among violators in I_low
        let mut best = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            if !in_low(y[t], alpha[t], c) {
                continue;
            }
            let b = gmax + y[t] * grad[t];
            if b > 0.0 {
                let a = kernel_matrix[i][i] + kernel_matrix[t][t] - 2.0 * kernel_matrix[i][t];
                let a = if a > 0.0 { a } else { TAU };
                let obj = -(b * b) / a;
                if obj < best {
                    best = obj;
                    j_sel = Some(t);
                }
            }
        }
        let Some(j) = j_sel else { break };
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (q(i, i) + q(j, j) + 2.0 * q(i, j)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * q(i, j)).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (k, g) in grad.iter_mut().enumerate() {
            *g += q(i, k) * di + q(j, k) * dj;
        }
    }

    // offset from free vectors, else the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };
    SmoSolution {
        alpha,
        bias: -rho,
        iterations,
        kkt_gap: gap.max(0.0),
    }
}

/// A trained two-class machine. Positive margin means the `positive` label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    pub positive: ClassLabel,
    pub negative: ClassLabel,
    pub support_vectors: Vec<Vec<f64>>,
    /// `a_i y_i` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub kernel: Kernel,
    pub c: f64,
}

impl BinarySvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, coef)| coef * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// `(+1 | -1, margin)`, with a zero margin mapped to +1.
    pub fn predict_sign(&self, x: &[f64]) -> (i8, f64) {
        let f = self.decision(x);
        (if f >= 0.0 { 1 } else { -1 }, f)
    }
}

pub fn kernel_matrix(kernel: Kernel, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&x[i], &x[j]);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}

/// Binary training on labels in {-1, +1}. Returns the machine along with the
/// full dual solution.
pub fn train_svm(
    x: &[Vec<f64>],
    y: &[f64],
    params: &SvmParams,
) -> Result<(BinarySvm, SmoSolution), ModelError> {
    params.validate()?;
    if x.is_empty() {
        return Err(ModelError::EmptyMatrix);
    }
    if x.len() != y.len() {
        return Err(ModelError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let has_pos = y.iter().any(|v| *v > 0.0);
    let has_neg = y.iter().any(|v| *v < 0.0);
    if !(has_pos && has_neg) {
        return Err(ModelError::SingleClass);
    }
    if let Some(bad) = y.iter().find(|v| **v != 1.0 && **v != -1.0) {
        return Err(ModelError::InvalidParams(format!("label {bad} not in {{-1, +1}}")));
    }
    let k = kernel_matrix(params.kernel, x);
    let n = x.len();
    let max_iter = params.max_passes.saturating_mul(n * n).max(1000);
    let sol = solve_smo(&k, y, params.c, params.tol, max_iter);
    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for i in 0..n {
        if sol.alpha[i] > 0.0 {
            support_vectors.push(x[i].clone());
            dual_coef.push(sol.alpha[i] * y[i]);
        }
    }
    let machine = BinarySvm {
        positive: ClassLabel::Startle,
        negative: ClassLabel::Surprise,
        support_vectors,
        dual_coef,
        bias: sol.bias,
        kernel: params.kernel,
        c: params.c,
    };
    Ok((machine, sol))
}

/// One-vs-one ensemble over the given classes (a single machine for two).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub classes: Vec<ClassLabel>,
    pub machines: Vec<BinarySvm>,
}

pub fn train_svm_multiclass(
    x: &[Vec<f64>],
    y: &[ClassLabel],
    classes: &[ClassLabel],
    params: &SvmParams,
) -> Result<SvmModel, ModelError> {
    params.validate()?;
    match check_training_set(x, y, classes) {
        Err(ModelError::ClassAbsent(_)) => return Err(ModelError::SingleClass),
        other => {
            other?;
        }
    }
    let mut machines = Vec::new();
    for (a, &pos) in classes.iter().enumerate() {
        for &neg in &classes[a + 1..] {
            let (rows, labels): (Vec<Vec<f64>>, Vec<f64>) = x
                .iter()
                .zip(y)
                .filter(|(_, l)| **l == pos || **l == neg)
                .map(|(r, l)| (r.clone(), if *l == pos { 1.0 } else { -1.0 }))
                .unzip();
            let (mut m, _) = train_svm(&rows, &labels, params)?;
            m.positive = pos;
            m.negative = neg;
            machines.push(m);
        }
    }
    Ok(SvmModel {
        classes: classes.to_vec(),
        machines,
    })
}

impl SvmModel {
    /// Pairwise votes and summed signed margins per class.
    pub fn votes(&self, x: &[f64]) -> (Vec<usize>, Vec<f64>) {
        let k = self.classes.len();
        let mut votes = vec![0usize; k];
        let mut margins = vec![0.0; k];
        let idx = |l: ClassLabel| self.classes.iter().position(|c| *c == l).unwrap();
        for m in &self.machines {
            let (sign, f) = m.predict_sign(x);
            let (p, n) = (idx(m.positive), idx(m.negative));
            if sign > 0 {
                votes[p] += 1;
            } else {
                votes[n] += 1;
            }
            margins[p] += f;
            margins[n] -= f;
        }
        (votes, margins)
    }

    /// Majority of pairwise votes; ties go to the larger summed margin, then
    /// to the lower label. Scores are a softmax over the summed margins.
    pub fn predict(&self, x: &[f64]) -> Prediction {
        let (votes, margins) = self.votes(x);
        let mut best = 0;
        for c in 1..self.classes.len() {
            let better = votes[c] > votes[best]
                || (votes[c] == votes[best] && margins[c] > margins[best]);
            if better {
                best = c;
            }
        }
        let max = margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = margins.iter().map(|m| (m - max).exp()).collect();
        let total: f64 = exp.iter().sum();
        Prediction {
            label: self.classes[best],
            scores: self
                .classes
                .iter()
                .zip(exp)
                .map(|(c, e)| (*c, e / total))
                .collect(),
        }
    }
}

pub fn predict_svm(model: &SvmModel, x: &[f64]) -> Prediction {
    model.predict(x)
}
