//! Filter scorers and top-fraction selection.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::seed;
use crate::Matrix;

/// One score per feature from a single scorer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub scorer: String,
    pub parameters: BTreeMap<String, String>,
    pub scores: BTreeMap<String, f64>,
}

impl ScoreTable {
    pub fn new(scorer: &str, names: &[String], scores: Vec<f64>) -> Result<ScoreTable> {
        if names.len() != scores.len() {
            return Err(Error::argument("one score per feature is required"));
        }
        let mut map = BTreeMap::new();
        for (n, s) in names.iter().zip(scores) {
            if !s.is_finite() {
                return Err(Error::argument(format!("score for `{n}` is not finite")));
            }
            if map.insert(n.clone(), s).is_some() {
                return Err(Error::argument(format!("feature `{n}` appears twice")));
            }
        }
        Ok(ScoreTable {
            scorer: scorer.to_string(),
            parameters: BTreeMap::new(),
            scores: map,
        })
    }

    pub fn with_parameter(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.scores.get(name).copied()
    }

    /// Features by descending score, ties by ascending name.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<(&str, f64)> = self.scores.iter().map(|(k, &s)| (k.as_str(), s)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
        v
    }
}

fn check_labels(x: &Matrix, y: &[u8]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::argument("X and y differ in row count"));
    }
    if y.iter().any(|&t| t > 1) {
        return Err(Error::argument("labels must be 0 or 1"));
    }
    Ok(())
}

/// Chi-square statistic of the per-class feature sums against the sums
/// expected from the class priors.
pub fn chi2_scores(names: &[String], x: &Matrix, y: &[u8]) -> Result<ScoreTable> {
    check_labels(x, y)?;
    if let Some(v) = x.as_slice().iter().find(|&&v| !(v >= 0.0)) {
        return Err(Error::argument(format!("chi-square needs non-negative features, found {v}")));
    }
    let n = y.len() as f64;
    let prior1 = y.iter().filter(|&&t| t == 1).count() as f64 / n;
    let priors = [1.0 - prior1, prior1];
    let scores = (0..x.cols())
        .map(|j| {
            let mut observed = [0.0; 2];
            for i in 0..x.rows() {
                observed[y[i] as usize] += x.get(i, j);
            }
            let total = observed[0] + observed[1];
            (0..2)
                .map(|c| {
                    let expected = priors[c] * total;
                    if expected > 0.0 {
                        (observed[c] - expected).powi(2) / expected
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect();
    ScoreTable::new("chi2", names, scores)
}

fn is_indicator(col: &[f64]) -> bool {
    col.iter().all(|&v| v == 0.0 || v == 1.0)
}

/// Plug-in estimate over the contingency table of a discrete feature.
pub fn mi_plugin(col: &[f64], y: &[u8]) -> f64 {
    let n = y.len() as f64;
    let mut joint: BTreeMap<(u64, u8), f64> = BTreeMap::new();
    let mut px: BTreeMap<u64, f64> = BTreeMap::new();
    let mut py = [0.0; 2];
    for (&v, &t) in col.iter().zip(y) {
        *joint.entry((v.to_bits(), t)).or_default() += 1.0;
        *px.entry(v.to_bits()).or_default() += 1.0;
        py[t as usize] += 1.0;
    }
    joint
        .iter()
        .map(|(&(v, t), &c)| c / n * (n * c / (px[&v] * py[t as usize])).ln())
        .sum::<f64>()
        .max(0.0)
}

/// Nearest-neighbour estimate for a continuous feature and a discrete target.
fn mi_continuous(c: &[f64], y: &[u8], k: usize) -> f64 {
    let n = c.len();
    let members: [Vec<usize>; 2] = [
        (0..n).filter(|&i| y[i] == 0).collect(),
        (0..n).filter(|&i| y[i] == 1).collect(),
    ];
    let mut radius = vec![0.0; n];
    let mut dist = Vec::with_capacity(n);
    for group in &members {
        for &i in group {
            dist.clear();
            dist.extend(group.iter().filter(|&&j| j != i).map(|&j| (c[j] - c[i]).abs()));
            let (_, kth, _) = dist.select_nth_unstable_by(k - 1, f64::total_cmp);
            radius[i] = if *kth > 0.0 { kth.next_down() } else { 0.0 };
        }
    }
    let mean_psi_m = (0..n)
        .map(|i| {
            let m = c.iter().filter(|&&v| (v - c[i]).abs() <= radius[i]).count();
            digamma(m as f64)
        })
        .sum::<f64>()
        / n as f64;
    let mean_psi_label = (0..n).map(|i| digamma(members[y[i] as usize].len() as f64)).sum::<f64>() / n as f64;
    (digamma(n as f64) + digamma(k as f64) - mean_psi_label - mean_psi_m).max(0.0)
}

// Seed for a row's noise, derived from its content so the estimate does not
// depend on row order.
fn row_key(master: u64, row: &[f64], label: u8) -> u64 {
    let mut h = seed::derive(master, "mi-row", u64::from(label));
    for v in row {
        h = seed::derive(h, "", v.to_bits());
    }
    h
}

/// Mutual information (nats) between each feature and the label. Columns
/// holding only 0/1 use the plug-in estimator; the rest are scaled to unit
/// standard deviation, jittered by `1e-10` noise, and use the k-nearest
/// neighbour estimator.
pub fn mi_scores(names: &[String], x: &Matrix, y: &[u8], k: usize, seed_value: u64) -> Result<ScoreTable> {
    check_labels(x, y)?;
    if k < 1 {
        return Err(Error::argument("MI needs k >= 1"));
    }
    let smallest = {
        let pos = y.iter().filter(|&&t| t == 1).count();
        pos.min(y.len() - pos)
    };
    if k >= smallest {
        return Err(Error::argument(format!(
            "MI needs k below the smallest class count ({k} >= {smallest})"
        )));
    }
    let keys: Vec<u64> = (0..x.rows()).map(|i| row_key(seed_value, x.row(i), y[i])).collect();
    let scores = (0..x.cols())
        .map(|j| {
            let mut col = x.column(j);
            if is_indicator(&col) {
                return mi_plugin(&col, y);
            }
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
            if sd == 0.0 {
                return 0.0;
            }
            col.iter_mut().for_each(|v| *v /= sd);
            let amp = 1e-10 * (col.iter().map(|v| v.abs()).sum::<f64>() / n).max(1.0);
            for (i, v) in col.iter_mut().enumerate() {
                let z: f64 = seed::derived_rng(keys[i], "mi-noise", j as u64).sample(StandardNormal);
                *v += amp * z;
            }
            mi_continuous(&col, y, k)
        })
        .collect();
    Ok(ScoreTable::new("mutual_information", names, scores)?.with_parameter("n_neighbors", k))
}

/// The `ceil(fraction * m)` best features, ties at the cut broken by
/// ascending name.
pub fn top_fraction(table: &ScoreTable, fraction: f64) -> Result<BTreeSet<String>> {
    if table.scores.is_empty() {
        return Err(Error::argument("empty score table"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::argument(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    let m = table.scores.len();
    let keep = ((fraction * m as f64 - 1e-9).ceil() as usize).clamp(1, m);
    Ok(table.ranked().into_iter().take(keep).map(|(n, _)| n.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(m: usize) -> Vec<String> {
        (0..m).map(|j| format!("f{j:02}")).collect()
    }

    #[test]
    fn chi2_examples() {
        let x = Matrix::from_rows(&[[1.0, 0.0, 0.5], [1.0, 0.0, 0.2], [0.0, 0.0, 0.5], [0.0, 0.0, 0.2]]).unwrap();
        let t = chi2_scores(&names(3), &x, &[1, 1, 0, 0]).unwrap();
        assert_eq!(t.get("f00"), Some(2.0));
        assert_eq!(t.get("f01"), Some(0.0));
        assert!(t.get("f02").unwrap().abs() < 1e-12);
        let neg = Matrix::from_rows(&[[-1.0]]).unwrap();
        assert!(chi2_scores(&names(1), &neg, &[1]).is_err());
    }

    #[test]
    fn mi_of_label_copy_is_ln2() {
        let y: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let rows: Vec<[f64; 2]> = y.iter().map(|&t| [f64::from(t), 3.0]).collect();
        let t = mi_scores(&names(2), &Matrix::from_rows(&rows).unwrap(), &y, 3, 0).unwrap();
        assert!((t.get("f00").unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(t.get("f01").unwrap().abs() < 1e-12);
    }

    #[test]
    fn mi_rejects_large_k() {
        let x = Matrix::from_rows(&[[0.1], [0.2], [0.3], [0.4]]).unwrap();
        assert!(mi_scores(&names(1), &x, &[0, 0, 0, 1], 1, 0).is_err());
    }

    #[test]
    fn top_fraction_rounding_and_ties() {
        let t = ScoreTable::new("s", &names(24), (0..24).map(f64::from).collect()).unwrap();
        assert_eq!(top_fraction(&t, 0.7).unwrap().len(), 17);
        assert_eq!(top_fraction(&t, 1.0).unwrap().len(), 24);
        let ten = ScoreTable::new("s", &names(10), vec![1.0; 10]).unwrap();
        assert_eq!(top_fraction(&ten, 0.7).unwrap().len(), 7);
        let tie = ScoreTable::new("s", &["b".into(), "a".into(), "c".into()], vec![1.0, 1.0, 2.0]).unwrap();
        let got: Vec<String> = top_fraction(&tie, 0.5).unwrap().into_iter().collect();
        assert_eq!(got, vec!["a", "c"]);
        assert!(top_fraction(&ScoreTable::new("s", &[], vec![]).unwrap(), 0.5).is_err());
    }
}
