use serde::{Deserialize, Serialize};

use crate::matrix::squared_euclidean;
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl Knn {
    pub fn new(x: &Matrix, y: &[u8], k: usize) -> Self {
        Knn {
            k,
            rows: x.iter_rows().map(<[f64]>::to_vec).collect(),
            labels: y.to_vec(),
        }
    }

    /// Fraction of class 1 among the `k` nearest training rows (Euclidean;
    /// equal distances go to the earlier row).
    pub fn score_row(&self, row: &[f64]) -> f64 {
        let mut d: Vec<(f64, usize)> =
            self.rows.iter().enumerate().map(|(i, r)| (squared_euclidean(r, row), i)).collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, cmp);
            d.truncate(self.k);
        }
        d.iter().map(|&(_, i)| f64::from(self.labels[i])).sum::<f64>() / self.k as f64
    }
}
