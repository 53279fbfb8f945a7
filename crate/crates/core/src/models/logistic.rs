//! L2-regularised logistic regression fitted by L-BFGS.

use serde::{Deserialize, Serialize};

use super::sigmoid;
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    pub coef: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub converged: bool,
}

// softplus(-z) = log(1 + e^-z)
fn softplus_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Mean logistic loss plus `||w||^2 / (2 C n)`; the intercept is not
/// penalised. Returns the objective and writes the gradient.
fn objective(x: &Matrix, s: &[f64], c: f64, theta: &[f64], grad: &mut [f64]) -> f64 {
    let (n, m) = (x.rows(), x.cols());
    let nf = n as f64;
    let (w, b) = theta.split_at(m);
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut loss = 0.0;
    for i in 0..n {
        let row = x.row(i);
        let z = s[i] * (row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b[0]);
        loss += softplus_neg(z);
        let coef = -s[i] * sigmoid(-z) / nf;
        for (g, a) in grad[..m].iter_mut().zip(row) {
            *g += coef * a;
        }
        grad[m] += coef;
    }
    let reg = 1.0 / (c * nf);
    for j in 0..m {
        grad[j] += reg * w[j];
    }
    loss / nf + 0.5 * reg * w.iter().map(|v| v * v).sum::<f64>()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn fit(x: &Matrix, y: &[u8], c: f64, max_iter: usize, tol: f64) -> Logistic {
    const HISTORY: usize = 10;
    let dim = x.cols() + 1;
    let s: Vec<f64> = y.iter().map(|&t| if t == 1 { 1.0 } else { -1.0 }).collect();
    let mut theta = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut f = objective(x, &s, c, &theta, &mut grad);
    let mut mem: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut iterations = 0;
    let mut converged = grad.iter().all(|g| g.abs() <= tol);
    let mut trial = vec![0.0; dim];
    let mut trial_grad = vec![0.0; dim];
    while !converged && iterations < max_iter {
        iterations += 1;
        // two-loop recursion
        let mut d: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut alphas = Vec::with_capacity(mem.len());
        for (sv, yv, rho) in mem.iter().rev() {
            let a = rho * dot(sv, &d);
            d.iter_mut().zip(yv).for_each(|(di, yi)| *di -= a * yi);
            alphas.push(a);
        }
        if let Some((sv, yv, _)) = mem.last() {
            let scale = dot(sv, yv) / dot(yv, yv);
            d.iter_mut().for_each(|v| *v *= scale);
        } else {
            let norm = grad.iter().map(|g| g.abs()).sum::<f64>().max(1.0);
            d.iter_mut().for_each(|v| *v /= norm);
        }
        for ((sv, yv, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let bcoef = rho * dot(yv, &d);
            d.iter_mut().zip(sv).for_each(|(di, si)| *di += (a - bcoef) * si);
        }
        let mut slope = dot(&grad, &d);
        if slope >= 0.0 {
            d = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &d);
            mem.clear();
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            for k in 0..dim {
                trial[k] = theta[k] + step * d[k];
            }
            let ft = objective(x, &s, c, &trial, &mut trial_grad);
            if ft <= f + 1e-4 * step * slope {
                let sv: Vec<f64> = (0..dim).map(|k| trial[k] - theta[k]).collect();
                let yv: Vec<f64> = (0..dim).map(|k| trial_grad[k] - grad[k]).collect();
                let sy = dot(&sv, &yv);
                if sy > 1e-12 {
                    if mem.len() == HISTORY {
                        mem.remove(0);
                    }
                    mem.push((sv, yv, 1.0 / sy));
                }
                theta.copy_from_slice(&trial);
                grad.copy_from_slice(&trial_grad);
                f = ft;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        converged = grad.iter().all(|g| g.abs() <= tol);
        if !accepted {
            break;
        }
    }
    let intercept = theta.pop().expect("intercept");
    Logistic {
        coef: theta,
        intercept,
        iterations,
        converged,
    }
}

impl Logistic {
    pub fn decision_row(&self, row: &[f64]) -> f64 {
        dot(&self.coef, row) + self.intercept
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let x = Matrix::from_rows(&[[0.5, -1.0], [1.5, 2.0], [-0.3, 0.2]]).unwrap();
        let s = [1.0, -1.0, 1.0];
        let theta = [0.3, -0.2, 0.1];
        let mut g = [0.0; 3];
        objective(&x, &s, 1.0, &theta, &mut g);
        let mut scratch = [0.0; 3];
        for k in 0..3 {
            let (mut a, mut b) = (theta, theta);
            a[k] += 1e-6;
            b[k] -= 1e-6;
            let fd = (objective(&x, &s, 1.0, &a, &mut scratch) - objective(&x, &s, 1.0, &b, &mut scratch)) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-8);
        }
    }
}
