//! Gradient boosting (first and second order) and real AdaBoost.

use serde::{Deserialize, Serialize};

use super::tree::{grow, ClassCriterion, Criterion, GrowParams, Stats, Tree};
use super::{normalized, sigmoid};
use crate::Matrix;

fn log_loss(y: &[u8], f: &[f64]) -> f64 {
    // log(1 + e^-z) for the signed margin z
    y.iter()
        .zip(f)
        .map(|(&t, &m)| {
            let z = if t == 1 { m } else { -m };
            if z > 0.0 {
                (-z).exp().ln_1p()
            } else {
                -z + z.exp().ln_1p()
            }
        })
        .sum::<f64>()
        / y.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosting {
    pub init: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    /// Mean training log-loss after each stage.
    pub train_loss: Vec<f64>,
}

/// Logistic-loss boosting of depth-limited regression trees. Splits use the
/// Friedman MSE improvement on the residuals; each leaf takes a single Newton
/// step `sum(r) / sum(p (1 - p))`.
pub fn fit_gboost(x: &Matrix, y: &[u8], n_stages: usize, learning_rate: f64, max_depth: usize) -> GradientBoosting {
    let n = y.len();
    let pos = y.iter().filter(|&&t| t == 1).count() as f64 / n as f64;
    let init = (pos / (1.0 - pos)).ln();
    let mut f = vec![init; n];
    let samples: Vec<usize> = (0..n).collect();
    let mut params = GrowParams::new(Criterion::FriedmanMse);
    params.max_depth = Some(max_depth);
    let mut trees = Vec::with_capacity(n_stages);
    let mut train_loss = Vec::with_capacity(n_stages);
    let leaf = |s: &Stats| if s[3].abs() < 1e-150 { 0.0 } else { s[1] / s[3] };
    for _ in 0..n_stages {
        let stats: Vec<Stats> = (0..n)
            .map(|i| {
                let p = sigmoid(f[i]);
                let r = f64::from(y[i]) - p;
                [1.0, r, r * r, p * (1.0 - p)]
            })
            .collect();
        let tree = grow(x, &stats, &samples, params, None, &leaf);
        for (i, fi) in f.iter_mut().enumerate() {
            *fi += learning_rate * tree.predict_row(x.row(i));
        }
        train_loss.push(log_loss(y, &f));
        trees.push(tree);
    }
    GradientBoosting {
        init,
        learning_rate,
        trees,
        train_loss,
    }
}

impl GradientBoosting {
    pub fn decision_row(&self, row: &[f64]) -> f64 {
        self.init + self.learning_rate * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn importances(&self) -> Vec<f64> {
        sum_importances(&self.trees)
    }
}

fn sum_importances(trees: &[Tree]) -> Vec<f64> {
    let m = trees.first().map_or(0, |t| t.importances.len());
    let mut acc = vec![0.0; m];
    for t in trees {
        for (a, v) in acc.iter_mut().zip(&t.importances) {
            *a += v;
        }
    }
    normalized(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderBoosting {
    pub base_margin: f64,
    pub trees: Vec<Tree>,
}

pub struct SecondOrderParams {
    pub n_rounds: usize,
    pub eta: f64,
    pub max_depth: usize,
    pub lambda: f64,
    pub min_child_weight: f64,
    /// Replace the hessian by 1 (plain gradient boosting on the residuals).
    pub unit_hessian: bool,
}

/// Leaf weight `-G / (H + lambda)`.
pub fn newton_leaf(g: f64, h: f64, lambda: f64) -> f64 {
    -g / (h + lambda)
}

/// Regularised second-order boosting with logistic loss: gain
/// `G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)` and shrunken Newton leaves.
pub fn fit_xgb(x: &Matrix, y: &[u8], p: &SecondOrderParams) -> SecondOrderBoosting {
    let n = y.len();
    let mut f = vec![0.0; n];
    let samples: Vec<usize> = (0..n).collect();
    let mut params = GrowParams::new(Criterion::SecondOrder {
        lambda: p.lambda,
        min_child_weight: p.min_child_weight,
    });
    params.max_depth = Some(p.max_depth);
    let (eta, lambda) = (p.eta, p.lambda);
    let leaf = move |s: &Stats| eta * newton_leaf(s[1], s[2], lambda);
    let mut trees = Vec::with_capacity(p.n_rounds);
    for _ in 0..p.n_rounds {
        let stats: Vec<Stats> = (0..n)
            .map(|i| {
                let q = sigmoid(f[i]);
                let h = if p.unit_hessian { 1.0 } else { q * (1.0 - q) };
                [1.0, q - f64::from(y[i]), h, 0.0]
            })
            .collect();
        let tree = grow(x, &stats, &samples, params, None, &leaf);
        for (i, fi) in f.iter_mut().enumerate() {
            *fi += tree.predict_row(x.row(i));
        }
        trees.push(tree);
    }
    SecondOrderBoosting { base_margin: 0.0, trees }
}

impl SecondOrderBoosting {
    pub fn decision_row(&self, row: &[f64]) -> f64 {
        self.base_margin + self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn importances(&self) -> Vec<f64> {
        sum_importances(&self.trees)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    /// Stumps whose leaves hold the clipped log-ratio `ln(p1 / p0)`.
    pub stumps: Vec<Tree>,
}

/// `ln(p1 / p0)` of a leaf from its two class masses, each fraction clipped
/// at machine epsilon. Keeping both masses (rather than `1 - p1`) makes the
/// value exactly antisymmetric under a label swap.
fn log_ratio(s: &Stats) -> f64 {
    if s[0] <= 0.0 {
        return 0.0;
    }
    let eps = f64::EPSILON;
    (s[1] / s[0]).max(eps).ln() - (s[2] / s[0]).max(eps).ln()
}

/// Real AdaBoost (SAMME.R) for two classes over weighted depth-1 trees.
pub fn fit_adaboost(x: &Matrix, y: &[u8], n_rounds: usize, learning_rate: f64) -> AdaBoost {
    let n = y.len();
    let mut w = vec![1.0 / n as f64; n];
    let mut stumps = Vec::with_capacity(n_rounds);
    let mut params = GrowParams::new(Criterion::Class(ClassCriterion::Gini));
    params.max_depth = Some(1);
    for round in 0..n_rounds {
        let stats: Vec<Stats> = (0..n)
            .map(|i| {
                let t = f64::from(y[i]);
                [w[i], w[i] * t, w[i] * (1.0 - t), 0.0]
            })
            .collect();
        let samples: Vec<usize> = (0..n).filter(|&i| w[i] > 0.0).collect();
        let stump = grow(x, &stats, &samples, params, None, &log_ratio);
        let margin: Vec<f64> = (0..n)
            .map(|i| {
                let v = stump.predict_row(x.row(i));
                if y[i] == 1 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        let error: f64 = (0..n).filter(|&i| margin[i] <= 0.0).map(|i| w[i]).sum::<f64>() / total;
        stumps.push(stump);
        if error <= 0.0 || round + 1 == n_rounds {
            break;
        }
        for i in 0..n {
            w[i] *= (-0.5 * learning_rate * margin[i]).exp();
        }
        let s: f64 = w.iter().sum();
        if !(s > 0.0) || !s.is_finite() {
            break;
        }
        w.iter_mut().for_each(|v| *v /= s);
    }
    AdaBoost { stumps }
}

impl AdaBoost {
    /// Mean leaf log-ratio over the stumps; positive favours class 1.
    pub fn decision_row(&self, row: &[f64]) -> f64 {
        self.stumps.iter().map(|s| s.predict_row(row)).sum::<f64>() / self.stumps.len() as f64
    }

    pub fn importances(&self) -> Vec<f64> {
        let m = self.stumps.first().map_or(0, |t| t.importances.len());
        let mut acc = vec![0.0; m];
        for t in &self.stumps {
            let s: f64 = t.importances.iter().sum();
            if s > 0.0 {
                for (a, v) in acc.iter_mut().zip(&t.importances) {
                    *a += v / s;
                }
            }
        }
        normalized(acc)
    }
}
