use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{accuracy, confusion};
use crate::error::{Error, Result};
use crate::models::{train, ModelSpec};
use crate::seed;
use crate::Matrix;

/// Shuffles each class with its own seeded stream and deals its rows round
/// robin, continuing the fold offset from one class to the next so fold
/// sizes differ by at most one.
pub fn stratified_folds(y: &[u8], k: usize, seed_value: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::argument("need at least two folds"));
    }
    let mut folds = vec![Vec::new(); k];
    let mut offset = 0;
    for class in 0..=1u8 {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::argument(format!(
                "class {class} has {} rows, fewer than {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut seed::derived_rng(seed_value, "fold-class", u64::from(class)));
        for (t, i) in members.into_iter().enumerate() {
            folds[(offset + t) % k].push(i);
        }
        offset = (offset + y.iter().filter(|&&v| v == class).count()) % k;
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvMode {
    /// Preparation (including oversampling) runs once before the folds.
    PaperFaithful,
    /// Preparation is refitted inside every training fold.
    Strict,
}

impl CvMode {
    pub fn label(self) -> &'static str {
        match self {
            CvMode::PaperFaithful => "paper-faithful",
            CvMode::Strict => "strict",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    /// Fold accuracies, repeat-major.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl CvResult {
    pub fn from_accuracies(folds: usize, repeats: usize, seed: u64, accuracies: Vec<f64>) -> Self {
        let n = accuracies.len().max(1) as f64;
        let mean = accuracies.iter().sum::<f64>() / n;
        let std = (accuracies.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n).sqrt();
        CvResult {
            folds,
            repeats,
            seed,
            accuracies,
            mean,
            std,
        }
    }
}

/// Fold assignment for repeat `r`. With as many folds as rows every row is
/// its own fold (leave-one-out).
pub fn repeat_folds(y: &[u8], folds: usize, seed_value: u64, repeat: usize) -> Result<Vec<Vec<usize>>> {
    if folds == y.len() {
        return Ok((0..y.len()).map(|i| vec![i]).collect());
    }
    stratified_folds(y, folds, seed::derive(seed_value, "cv-repeat", repeat as u64))
}

/// Seed handed to the fit on `(repeat, fold)`.
pub fn fit_seed(seed_value: u64, repeat: usize, fold: usize) -> u64 {
    seed::derive(seed::derive(seed_value, "cv-fit", repeat as u64), "fold", fold as u64)
}

/// Runs `eval(train_rows, validation_rows, fit_seed)` for every fold of every
/// repeat. Fits run in parallel; results keep repeat-major order.
pub fn repeated_cv_with<F>(y: &[u8], folds: usize, repeats: usize, seed_value: u64, eval: F) -> Result<CvResult>
where
    F: Fn(&[usize], &[usize], u64) -> Result<f64> + Sync,
{
    if repeats < 1 {
        return Err(Error::argument("need at least one repeat"));
    }
    let mut jobs = Vec::with_capacity(folds * repeats);
    for r in 0..repeats {
        let assignment = repeat_folds(y, folds, seed_value, r)?;
        for (f, held_out) in assignment.iter().enumerate() {
            let train: Vec<usize> = (0..y.len()).filter(|i| held_out.binary_search(i).is_err()).collect();
            jobs.push((train, held_out.clone(), fit_seed(seed_value, r, f)));
        }
    }
    let accuracies = jobs
        .par_iter()
        .map(|(train, held_out, s)| eval(train, held_out, *s))
        .collect::<Result<Vec<f64>>>()?;
    Ok(CvResult::from_accuracies(folds, repeats, seed_value, accuracies))
}

/// Repeated stratified k-fold accuracy of `spec` on prepared data.
pub fn repeated_cv(
    spec: &ModelSpec,
    features: &[String],
    x: &Matrix,
    y: &[u8],
    folds: usize,
    repeats: usize,
    seed_value: u64,
) -> Result<CvResult> {
    repeated_cv_with(y, folds, repeats, seed_value, |train_rows, test_rows, s| {
        let ytr: Vec<u8> = train_rows.iter().map(|&i| y[i]).collect();
        let yte: Vec<u8> = test_rows.iter().map(|&i| y[i]).collect();
        let model = train(&ModelSpec { params: spec.params.clone(), seed: s }, features, &x.select_rows(train_rows), &ytr)?;
        let pred = model.predict(features, &x.select_rows(test_rows))?;
        Ok(accuracy(&confusion(&yte, &pred)?))
    })
}
