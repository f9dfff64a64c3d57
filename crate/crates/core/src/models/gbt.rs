//! Second-order gradient-boosted regression trees on the logistic (two
//! classes) or softmax (three classes) loss.
//!
//! Trees are grown by exact greedy search. For a node with gradient sum `G`
//! and hessian sum `H`, the leaf weight is `-G / (H + lambda)` and a split
//! into `L`/`R` gains
//! `1/2 [G_L²/(H_L+λ) + G_R²/(H_R+λ) - G²/(H+λ)]`.
//! Candidate splits are scanned feature by feature in ascending threshold
//! order and only a strictly better gain replaces the incumbent.
//!
//! If a boosting round would raise the training log-loss, the round's leaf
//! weights are halved until it does not.

use serde::{Deserialize, Serialize};

use super::{check_training_set, ModelError, Prediction};
use crate::types::ClassLabel;

const MIN_GAIN: f64 = 1e-12;
const HESS_FLOOR: f64 = 1e-16;
const MAX_BACKTRACK: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_rounds: usize,
    pub eta: f64,
    pub max_depth: usize,
    pub lambda: f64,
    pub min_child_weight: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            n_rounds: 50,
            eta: 0.3,
            max_depth: 3,
            lambda: 1.0,
            min_child_weight: 1.0,
        }
    }
}

impl GbtParams {
    fn validate(&self) -> Result<(), ModelError> {
        if self.n_rounds == 0 {
            return Err(ModelError::InvalidParams("n_rounds must be >= 1".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(ModelError::InvalidParams(format!("eta must be in (0, 1], got {}", self.eta)));
        }
        if self.max_depth == 0 {
            return Err(ModelError::InvalidParams("max_depth must be >= 1".into()));
        }
        if !(self.lambda >= 0.0) || !(self.min_child_weight >= 0.0) {
            return Err(ModelError::InvalidParams("lambda and min_child_weight must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Flat regression tree; node 0 is the root. `x[feature] < threshold` goes
/// left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(w) => return w,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] < threshold { left } else { right },
            }
        }
    }

    fn scale(&mut self, factor: f64) {
        for n in &mut self.nodes {
            if let Node::Leaf(w) = n {
                *w *= factor;
            }
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf(w) => Some(*w),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub classes: Vec<ClassLabel>,
    pub params: GbtParams,
    /// `trees[round][head]`; one head for two classes, one per class otherwise.
    pub trees: Vec<Vec<Tree>>,
    /// Training log-loss before the first round and after each round.
    pub train_loss: Vec<f64>,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    /// Row indices sorted by each feature, computed once per fit.
    sorted: &'a [Vec<usize>],
    params: &'a GbtParams,
}

impl Builder<'_> {
    fn build(&self, grad: &[f64], hess: &[f64], rows: &[usize]) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        let mut member = vec![false; self.x.len()];
        self.grow(&mut tree, grad, hess, rows, 0, &mut member);
        tree
    }

    fn leaf_weight(&self, g: f64, h: f64) -> f64 {
        -g / (h + self.params.lambda) * self.params.eta
    }

    fn grow(
        &self,
        tree: &mut Tree,
        grad: &[f64],
        hess: &[f64],
        rows: &[usize],
        depth: usize,
        member: &mut [bool],
    ) -> usize {
        let id = tree.nodes.len();
        let g: f64 = rows.iter().map(|&r| grad[r]).sum();
        let h: f64 = rows.iter().map(|&r| hess[r]).sum();
        tree.nodes.push(Node::Leaf(self.leaf_weight(g, h)));
        if depth >= self.params.max_depth || rows.len() < 2 {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(grad, hess, rows, g, h, member) else {
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| self.x[r][feature] < threshold);
        let left = self.grow(tree, grad, hess, &left_rows, depth + 1, member);
        let right = self.grow(tree, grad, hess, &right_rows, depth + 1, member);
        tree.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    fn best_split(
        &self,
        grad: &[f64],
        hess: &[f64],
        rows: &[usize],
        g: f64,
        h: f64,
        member: &mut [bool],
    ) -> Option<(usize, f64)> {
        let lambda = self.params.lambda;
        let mcw = self.params.min_child_weight;
        let parent = g * g / (h + lambda);
        for &r in rows {
            member[r] = true;
        }
        let mut best: Option<(f64, usize, f64)> = None;
        for (f, order) in self.sorted.iter().enumerate() {
            let (mut gl, mut hl) = (0.0, 0.0);
            let mut prev: Option<usize> = None;
            for &r in order.iter().filter(|&&r| member[r]) {
                if let Some(p) = prev {
                    let (a, b) = (self.x[p][f], self.x[r][f]);
                    if a < b && hl >= mcw && h - hl >= mcw {
                        let (gr, hr) = (g - gl, h - hl);
                        let gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent);
                        if gain > MIN_GAIN && best.is_none_or(|(bg, _, _)| gain > bg) {
                            let mid = a + (b - a) / 2.0;
                            let thr = if mid > a { mid } else { b };
                            best = Some((gain, f, thr));
                        }
                    }
                }
                gl += grad[r];
                hl += hess[r];
                prev = Some(r);
            }
        }
        for &r in rows {
            member[r] = false;
        }
        best.map(|(_, f, t)| (f, t))
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Class probabilities from raw head outputs.
fn probabilities(raw: &[f64]) -> Vec<f64> {
    if raw.len() == 1 {
        let p = sigmoid(raw[0]);
        vec![1.0 - p, p]
    } else {
        softmax(raw)
    }
}

/// Mean negative log-likelihood, computed stably from the raw outputs.
fn log_loss(raw: &[Vec<f64>], targets: &[usize]) -> f64 {
    let total: f64 = raw
        .iter()
        .zip(targets)
        .map(|(z, &t)| {
            if z.len() == 1 {
                // -log sigmoid(±z) = softplus(∓z)
                let s = if t == 1 { -z[0] } else { z[0] };
                s.max(0.0) + (-s.abs()).exp().ln_1p()
            } else {
                let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
                lse - z[t]
            }
        })
        .sum();
    total / raw.len() as f64
}

pub fn train_gbt(
    x: &[Vec<f64>],
    y: &[ClassLabel],
    classes: &[ClassLabel],
    params: &GbtParams,
) -> Result<GbtModel, ModelError> {
    params.validate()?;
    let distinct = classes.iter().filter(|c| y.contains(c)).count();
    if !y.is_empty() && distinct < 2 {
        return Err(ModelError::DegenerateLabels);
    }
    let d = check_training_set(x, y, classes)?;
    let n = x.len();
    let heads = if classes.len() == 2 { 1 } else { classes.len() };
    let targets: Vec<usize> = y
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();
    let sorted: Vec<Vec<usize>> = (0..d)
        .map(|f| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
            idx
        })
        .collect();
    let builder = Builder {
        x,
        sorted: &sorted,
        params,
    };
    let rows: Vec<usize> = (0..n).collect();

    let mut raw = vec![vec![0.0; heads]; n];
    let mut loss = log_loss(&raw, &targets);
    let mut train_loss = vec![loss];
    let mut trees = Vec::with_capacity(params.n_rounds);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];

    for _ in 0..params.n_rounds {
        let probs: Vec<Vec<f64>> = raw.iter().map(|z| probabilities(z)).collect();
        let mut round: Vec<Tree> = (0..heads)
            .map(|k| {
                for i in 0..n {
                    // head k models class k, or class 1 for the single binary head
                    let class = if heads == 1 { 1 } else { k };
                    let p = probs[i][class];
                    let target = if targets[i] == class { 1.0 } else { 0.0 };
                    grad[i] = p - target;
                    hess[i] = (p * (1.0 - p)).max(HESS_FLOOR);
                }
                builder.build(&grad, &hess, &rows)
            })
            .collect();

        let outputs: Vec<Vec<f64>> = (0..n)
            .map(|i| round.iter().map(|t| t.predict(&x[i])).collect())
            .collect();
        let mut factor = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACK {
            let trial: Vec<Vec<f64>> = raw
                .iter()
                .zip(&outputs)
                .map(|(z, o)| z.iter().zip(o).map(|(a, b)| a + factor * b).collect())
                .collect();
            let l = log_loss(&trial, &targets);
            if l <= loss {
                accepted = Some((trial, l));
                break;
            }
            factor *= 0.5;
        }
        match accepted {
            Some((trial, l)) => {
                if factor != 1.0 {
                    round.iter_mut().for_each(|t| t.scale(factor));
                }
                raw = trial;
                loss = l;
            }
            None => round.iter_mut().for_each(|t| t.scale(0.0)),
        }
        train_loss.push(loss);
        trees.push(round);
    }

    Ok(GbtModel {
        classes: classes.to_vec(),
        params: *params,
        trees,
        train_loss,
    })
}

impl GbtModel {
    pub fn raw_scores(&self, x: &[f64]) -> Vec<f64> {
        let heads = self.trees.first().map_or(1, Vec::len);
        let mut z = vec![0.0; heads];
        for round in &self.trees {
            for (k, t) in round.iter().enumerate() {
                z[k] += t.predict(x);
            }
        }
        z
    }

    pub fn tree_count(&self) -> usize {
        self.trees.iter().map(Vec::len).sum()
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        Prediction::from_scores(&self.classes, probabilities(&self.raw_scores(x)))
    }
}

pub fn predict_gbt(model: &GbtModel, x: &[f64]) -> Prediction {
    model.predict(x)
}
