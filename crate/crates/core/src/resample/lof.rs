use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nearest;
use crate::dataset::Frame;
use crate::error::{Error, Result};
use crate::Matrix;

const LRD_FLOOR: f64 = 1e-12;

/// Which scores count as outliers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LofRule {
    /// Flag every row whose factor exceeds `threshold`.
    Auto { threshold: f64 },
    /// Flag the `round(fraction * n)` highest factors.
    Contamination { fraction: f64 },
}

impl Default for LofRule {
    fn default() -> Self {
        LofRule::Auto { threshold: 1.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LofConfig {
    pub k: usize,
    #[serde(default)]
    pub rule: LofRule,
}

impl Default for LofConfig {
    fn default() -> Self {
        LofConfig {
            k: 20,
            rule: LofRule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LofOutcome {
    pub frame: Frame,
    /// Row indices (into the input) that were dropped, ascending.
    pub removed: Vec<usize>,
    pub scores: Vec<f64>,
}

/// Local outlier factor of every row against its `k` nearest neighbours.
pub fn lof_scores(x: &Matrix, k: usize) -> Result<Vec<f64>> {
    let n = x.rows();
    if k < 1 || k >= n {
        return Err(Error::argument(format!("LOF needs 1 <= k < n (k = {k}, n = {n})")));
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("LOF input must be fully imputed and finite".into()));
    }
    let all: Vec<usize> = (0..n).collect();
    let neighbours: Vec<Vec<(f64, usize)>> =
        (0..n).into_par_iter().map(|i| nearest(x, i, &all, k)).collect();
    let k_distance: Vec<f64> = neighbours.iter().map(|nb| nb[k - 1].0).collect();
    let lrd: Vec<f64> = neighbours
        .iter()
        .map(|nb| {
            let reach: f64 = nb.iter().map(|&(d, o)| d.max(k_distance[o])).sum::<f64>() / k as f64;
            1.0 / reach.max(LRD_FLOOR)
        })
        .collect();
    Ok(neighbours
        .iter()
        .enumerate()
        .map(|(i, nb)| nb.iter().map(|&(_, o)| lrd[o]).sum::<f64>() / (k as f64 * lrd[i]))
        .collect())
}

fn flagged(scores: &[f64], rule: LofRule) -> Result<Vec<usize>> {
    match rule {
        LofRule::Auto { threshold } => {
            Ok((0..scores.len()).filter(|&i| scores[i] > threshold).collect())
        }
        LofRule::Contamination { fraction } => {
            if !(0.0..0.5).contains(&fraction) {
                return Err(Error::argument("contamination must lie in [0, 0.5)"));
            }
            let count = (fraction * scores.len() as f64).round() as usize;
            let mut order: Vec<usize> = (0..scores.len()).collect();
            order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
            let mut out = order[..count].to_vec();
            out.sort_unstable();
            Ok(out)
        }
    }
}

/// Scores every row and applies the decision rule.
pub fn detect_outliers(train: &Frame, cfg: &LofConfig) -> Result<LofOutcome> {
    if train.n_rows() < cfg.k + 1 {
        return Err(Error::argument(format!(
            "LOF with k = {} needs at least {} rows, got {}",
            cfg.k,
            cfg.k + 1,
            train.n_rows()
        )));
    }
    let scores = lof_scores(&train.feature_matrix()?, cfg.k)?;
    let removed = flagged(&scores, cfg.rule)?;
    let keep: Vec<usize> = (0..train.n_rows()).filter(|i| removed.binary_search(i).is_err()).collect();
    Ok(LofOutcome {
        frame: train.select_rows(&keep),
        removed,
        scores,
    })
}

/// Drops flagged rows, keeping the others in their original order.
pub fn remove_outliers(train: &Frame, cfg: &LofConfig) -> Result<Frame> {
    detect_outliers(train, cfg).map(|o| o.frame)
}
