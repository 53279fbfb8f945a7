use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{class_leaf, class_stats, grow, ClassCriterion, Criterion, GrowParams, Tree};
use crate::seed;
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

pub struct ForestParams {
    pub n_trees: usize,
    pub criterion: ClassCriterion,
    pub max_depth: Option<usize>,
    pub max_features: usize,
}

/// Bagged trees; tree `t` draws its bootstrap and feature order from the
/// stream `(seed, t)`, so the result is independent of thread scheduling.
pub fn fit(x: &Matrix, y: &[u8], p: &ForestParams, seed_value: u64) -> Forest {
    let n = x.rows();
    let trees = (0..p.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::derived_rng(seed_value, "forest-tree", t as u64);
            let mut w = vec![0.0; n];
            for _ in 0..n {
                w[rng.gen_range(0..n)] += 1.0;
            }
            let (stats, samples) = class_stats(y, &w);
            let mut gp = GrowParams::new(Criterion::Class(p.criterion));
            gp.max_depth = p.max_depth;
            gp.max_features = Some(p.max_features);
            grow(x, &stats, &samples, gp, Some(&mut rng), &class_leaf)
        })
        .collect();
    Forest { trees }
}

impl Forest {
    /// Mean leaf probability; with pure leaves this is the vote fraction.
    pub fn score_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn importances(&self) -> Vec<f64> {
        let m = self.trees.first().map_or(0, |t| t.importances.len());
        let mut acc = vec![0.0; m];
        for t in &self.trees {
            let s: f64 = t.importances.iter().sum();
            if s > 0.0 {
                for (a, v) in acc.iter_mut().zip(&t.importances) {
                    *a += v / s;
                }
            }
        }
        super::normalized(acc)
    }
}
