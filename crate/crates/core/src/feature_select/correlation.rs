use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::filter::ScoreTable;
use crate::error::{Error, Result};
use crate::Matrix;

/// Pearson correlation matrix. Zero-variance columns correlate 0 with every
/// other column; the diagonal is 1.
pub fn pearson_matrix(x: &Matrix) -> Matrix {
    let (n, m) = (x.rows() as f64, x.cols());
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let c = x.column(j);
            let mean = c.iter().sum::<f64>() / n;
            c.into_iter().map(|v| v - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let mut r = Matrix::zeros(m, m);
    for a in 0..m {
        r.set(a, a, 1.0);
        for b in a + 1..m {
            let v = if norms[a] > 0.0 && norms[b] > 0.0 {
                let dot: f64 = cols[a].iter().zip(&cols[b]).map(|(p, q)| p * q).sum();
                (dot / (norms[a] * norms[b])).clamp(-1.0, 1.0)
            } else {
                0.0
            };
            r.set(a, b, v);
            r.set(b, a, v);
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedPair {
    pub a: String,
    pub b: String,
    pub r: f64,
}

/// Unordered pairs with `|r| >= threshold`, strongest first.
pub fn correlated_pairs(names: &[String], corr: &Matrix, threshold: f64) -> Vec<CorrelatedPair> {
    let mut out = Vec::new();
    for a in 0..names.len() {
        for b in a + 1..names.len() {
            let r = corr.get(a, b);
            if r.abs() >= threshold {
                out.push(CorrelatedPair {
                    a: names[a].clone(),
                    b: names[b].clone(),
                    r,
                });
            }
        }
    }
    out.sort_by(|p, q| q.r.abs().total_cmp(&p.r.abs()).then_with(|| (&p.a, &p.b).cmp(&(&q.a, &q.b))));
    out
}

/// For each pair with `|r| >= threshold`, the member with the lower chi-square
/// score (on equal scores, the later name).
pub fn high_corr_set(
    names: &[String],
    corr: &Matrix,
    chi2: &ScoreTable,
    threshold: f64,
) -> Result<BTreeSet<String>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::argument(format!("threshold must lie in (0, 1], got {threshold}")));
    }
    let score = |n: &str| {
        chi2.get(n)
            .ok_or_else(|| Error::schema(n, "feature has no chi-square score"))
    };
    let mut out = BTreeSet::new();
    for p in correlated_pairs(names, corr, threshold) {
        let (sa, sb) = (score(&p.a)?, score(&p.b)?);
        let drop = if sa < sb || (sa == sb && p.a > p.b) { p.a } else { p.b };
        out.insert(drop);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_diagonal_and_constant_columns() {
        let x = Matrix::from_rows(&[[1.0, 2.0, 5.0], [2.0, 4.1, 5.0], [3.0, 5.9, 5.0]]).unwrap();
        let r = pearson_matrix(&x);
        assert_eq!((r.get(0, 0), r.get(2, 2)), (1.0, 1.0));
        assert_eq!(r.get(0, 2), 0.0);
        assert!(r.get(0, 1) > 0.99);
        assert_eq!(r.get(0, 1), r.get(1, 0));
    }

    #[test]
    fn lower_chi2_member_is_dropped() {
        let names: Vec<String> = ["sc", "bu", "hemo"].iter().map(|s| s.to_string()).collect();
        let x = Matrix::from_rows(&[[1.0, 1.1, 0.3], [2.0, 2.0, 0.1], [3.0, 3.2, 0.2]]).unwrap();
        let chi2 = ScoreTable::new("chi2", &names, vec![5.0, 2.0, 9.0]).unwrap();
        let s = high_corr_set(&names, &pearson_matrix(&x), &chi2, 0.85).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec!["bu"]);
    }
}
