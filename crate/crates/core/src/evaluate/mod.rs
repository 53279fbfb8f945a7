//! Classification metrics, stratified folds, repeated cross-validation and
//! held-out evaluation.

mod cv;
mod metrics;

pub use cv::{fit_seed, repeat_folds, repeated_cv, repeated_cv_with, stratified_folds, CvMode, CvResult};
pub use metrics::{accuracy, auc, confusion, f1_macro, macro_auc, ConfusionCounts};

use serde::{Deserialize, Serialize};

use crate::dataset::Frame;
use crate::error::Result;
use crate::models::TrainedModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub f1_macro: f64,
    pub auc_macro: f64,
    pub confusion: ConfusionCounts,
}

impl MetricReport {
    pub fn compute(y_true: &[u8], scores: &[f64], threshold: f64) -> Result<MetricReport> {
        let pred: Vec<u8> = scores.iter().map(|&s| u8::from(s >= threshold)).collect();
        let c = confusion(y_true, &pred)?;
        Ok(MetricReport {
            accuracy: accuracy(&c),
            f1_macro: f1_macro(y_true, &pred)?,
            auc_macro: macro_auc(y_true, scores)?,
            confusion: c,
        })
    }
}

/// Scores a prepared test frame. The frame's feature list must match the
/// model's.
pub fn evaluate_test(model: &TrainedModel, test: &Frame, positive: &str) -> Result<MetricReport> {
    let scores = model.score_frame(test)?;
    MetricReport::compute(&test.targets(positive)?, &scores, model.threshold())
}
