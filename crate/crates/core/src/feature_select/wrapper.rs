//! Model-driven selectors: recursive elimination with cross-validation and
//! averaged impurity importances.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::{accuracy, confusion, stratified_folds};
use crate::models::{train, ModelSpec, TrainedModel};
use crate::seed;
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfecvResult {
    pub estimator: String,
    pub selected: BTreeSet<String>,
    /// Mean validation accuracy for 1, 2, ..., m features.
    pub mean_accuracy_by_count: Vec<f64>,
    /// 1 for selected features, larger for features eliminated earlier.
    pub ranking: BTreeMap<String, usize>,
}

fn importances(model: &TrainedModel) -> Result<Vec<f64>> {
    model.importances().ok_or_else(|| {
        Error::argument(format!("{} exposes no feature importances", model.algorithm()))
    })
}

/// Backward elimination from all columns down to `stop_at`, one feature per
/// step (lowest importance first, ties to the lowest column index).
/// `on_fit` sees every fitted model with its column subset. Returns the
/// columns in elimination order followed by the survivors.
fn eliminate(
    spec: &ModelSpec,
    names: &[String],
    x: &Matrix,
    y: &[u8],
    stop_at: usize,
    mut on_fit: impl FnMut(&[usize], &[String], &Matrix, &TrainedModel) -> Result<()>,
) -> Result<Vec<usize>> {
    let mut current: Vec<usize> = (0..x.cols()).collect();
    let mut eliminated = Vec::new();
    loop {
        let sub_names: Vec<String> = current.iter().map(|&j| names[j].clone()).collect();
        let sub = x.select_columns(&current);
        let model = train(spec, &sub_names, &sub, y)?;
        on_fit(&current, &sub_names, &sub, &model)?;
        if current.len() <= stop_at {
            break;
        }
        let imp = importances(&model)?;
        let worst = (0..imp.len())
            .min_by(|&a, &b| imp[a].total_cmp(&imp[b]).then(a.cmp(&b)))
            .expect("non-empty");
        eliminated.push(current.remove(worst));
    }
    eliminated.extend(current);
    Ok(eliminated)
}

/// Recursive feature elimination scored by stratified k-fold accuracy.
/// The count with the best mean accuracy wins (ties to the smaller count),
/// and a final elimination on all rows picks the features.
pub fn rfecv(
    names: &[String],
    x: &Matrix,
    y: &[u8],
    spec: &ModelSpec,
    folds: usize,
    seed_value: u64,
) -> Result<RfecvResult> {
    let m = x.cols();
    if m < 1 {
        return Err(Error::argument("RFECV needs at least one feature"));
    }
    let assignment = stratified_folds(y, folds, seed::derive(seed_value, "rfecv-folds", 0))?;
    let mut sums = vec![0.0; m];
    for (f, held_out) in assignment.iter().enumerate() {
        let train_rows: Vec<usize> = (0..y.len()).filter(|i| held_out.binary_search(i).is_err()).collect();
        let ytr: Vec<u8> = train_rows.iter().map(|&i| y[i]).collect();
        let yte: Vec<u8> = held_out.iter().map(|&i| y[i]).collect();
        let xte = x.select_rows(held_out);
        let fold_spec = ModelSpec {
            params: spec.params.clone(),
            seed: seed::derive(seed_value, "rfecv-fit", f as u64),
        };
        eliminate(&fold_spec, names, &x.select_rows(&train_rows), &ytr, 1, |cols, sub_names, _, model| {
            let pred = model.predict(sub_names, &xte.select_columns(cols))?;
            sums[cols.len() - 1] += accuracy(&confusion(&yte, &pred)?);
            Ok(())
        })?;
    }
    let means: Vec<f64> = sums.iter().map(|s| s / folds as f64).collect();
    let mut best = 0;
    for c in 1..m {
        if means[c] > means[best] {
            best = c;
        }
    }
    let target = best + 1;
    let final_spec = ModelSpec {
        params: spec.params.clone(),
        seed: seed::derive(seed_value, "rfecv-final", 0),
    };
    let order = eliminate(&final_spec, names, x, y, target, |_, _, _, _| Ok(()))?;
    let mut ranking = BTreeMap::new();
    let survivors = &order[m - target..];
    for (pos, &j) in order.iter().enumerate() {
        let rank = if pos >= m - target { 1 } else { m - target - pos + 1 };
        ranking.insert(names[j].clone(), rank);
    }
    Ok(RfecvResult {
        estimator: spec.algorithm().to_string(),
        selected: survivors.iter().map(|&j| names[j].clone()).collect(),
        mean_accuracy_by_count: means,
        ranking,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceResult {
    pub model: String,
    pub repeats: usize,
    pub mean_importances: BTreeMap<String, f64>,
    pub threshold: f64,
    pub selected: BTreeSet<String>,
}

/// Averages normalised importances over `repeats` fits with derived seeds
/// and keeps the features at or above the uniform share `1/m` of the total.
pub fn importance_select(
    names: &[String],
    x: &Matrix,
    y: &[u8],
    spec: &ModelSpec,
    repeats: usize,
    seed_value: u64,
) -> Result<ImportanceResult> {
    if repeats < 1 {
        return Err(Error::argument("need at least one repeat"));
    }
    let m = x.cols();
    let mut mean = vec![0.0; m];
    for r in 0..repeats {
        let s = ModelSpec {
            params: spec.params.clone(),
            seed: seed::derive(seed_value, "importance", r as u64),
        };
        let model = train(&s, names, x, y)?;
        for (a, v) in mean.iter_mut().zip(importances(&model)?) {
            *a += v / repeats as f64;
        }
    }
    let threshold = mean.iter().sum::<f64>() / m as f64;
    let selected = (0..m)
        .filter(|&j| mean[j] >= threshold - 1e-12 * threshold.abs())
        .map(|j| names[j].clone())
        .collect();
    Ok(ImportanceResult {
        model: spec.algorithm().to_string(),
        repeats,
        mean_importances: names.iter().cloned().zip(mean).collect(),
        threshold,
        selected,
    })
}
