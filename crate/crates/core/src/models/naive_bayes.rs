use serde::{Deserialize, Serialize};

use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_prior: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub epsilon: f64,
}

fn moments(x: &Matrix, rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let m = x.cols();
    let n = rows.len() as f64;
    let mut mean = vec![0.0; m];
    for &i in rows {
        for (a, v) in mean.iter_mut().zip(x.row(i)) {
            *a += v;
        }
    }
    mean.iter_mut().for_each(|a| *a /= n);
    let mut var = vec![0.0; m];
    for &i in rows {
        for ((a, v), mu) in var.iter_mut().zip(x.row(i)).zip(&mean) {
            *a += (v - mu) * (v - mu);
        }
    }
    var.iter_mut().for_each(|a| *a /= n);
    (mean, var)
}

/// Class variances are smoothed by `var_smoothing` times the largest
/// feature variance of the whole training matrix.
pub fn fit(x: &Matrix, y: &[u8], var_smoothing: f64) -> GaussianNb {
    let all: Vec<usize> = (0..x.rows()).collect();
    let (_, total_var) = moments(x, &all);
    let epsilon = var_smoothing * total_var.iter().cloned().fold(0.0, f64::max);
    let mut log_prior = [0.0; 2];
    let mut means: [Vec<f64>; 2] = Default::default();
    let mut variances: [Vec<f64>; 2] = Default::default();
    for c in 0..2u8 {
        let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        let (mu, mut var) = moments(x, &rows);
        var.iter_mut().for_each(|v| *v += epsilon);
        log_prior[c as usize] = (rows.len() as f64 / y.len() as f64).ln();
        means[c as usize] = mu;
        variances[c as usize] = var;
    }
    GaussianNb {
        log_prior,
        means,
        variances,
        epsilon,
    }
}

impl GaussianNb {
    fn joint_log_likelihood(&self, row: &[f64]) -> [f64; 2] {
        let mut out = self.log_prior;
        for c in 0..2 {
            for ((x, mu), var) in row.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                out[c] -= 0.5 * (2.0 * std::f64::consts::PI * var).ln() + (x - mu) * (x - mu) / (2.0 * var);
            }
        }
        out
    }

    /// Class posteriors `[P(0|x), P(1|x)]`.
    pub fn posterior(&self, row: &[f64]) -> [f64; 2] {
        let [a, b] = self.joint_log_likelihood(row);
        let mx = a.max(b);
        let (ea, eb) = ((a - mx).exp(), (b - mx).exp());
        let s = ea + eb;
        [ea / s, eb / s]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn posteriors_are_normalised() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.5], [4.0, 3.0], [5.0, 2.0]]).unwrap();
        let nb = fit(&x, &[0, 0, 1, 1], 1e-9);
        for row in [[0.0, 0.0], [2.5, 1.7], [100.0, -3.0]] {
            let p = nb.posterior(&row);
            assert!((p[0] + p[1] - 1.0).abs() <= 1e-12);
        }
    }
}
