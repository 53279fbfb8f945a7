use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts with class 1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        accuracy(self)
    }

    /// Recall of class 1.
    pub fn tpr(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Precision of class 1.
    pub fn ppv(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// The same table with classes 0 and 1 exchanged.
    pub fn swapped(&self) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tn,
            tn: self.tp,
            fp: self.fn_,
            fn_: self.fp,
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn check_binary(y: &[u8], what: &str) -> Result<()> {
    if y.iter().any(|&v| v > 1) {
        return Err(Error::argument(format!("{what} must be 0 or 1")));
    }
    Ok(())
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::argument(format!(
            "{} labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    check_binary(y_true, "labels")?;
    check_binary(y_pred, "predictions")?;
    let mut c = ConfusionCounts::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => c.tp += 1,
            (0, 0) => c.tn += 1,
            (0, _) => c.fp += 1,
            _ => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// `(TP + TN) / total`; 0 for an empty table.
pub fn accuracy(c: &ConfusionCounts) -> f64 {
    ratio(c.tp + c.tn, c.total())
}

fn f1(c: &ConfusionCounts) -> f64 {
    let (p, r) = (c.ppv(), c.tpr());
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Unweighted mean of the per-class F1 scores, each class taken as positive
/// in turn. A class whose precision and recall are both 0 scores 0.
pub fn f1_macro(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    let c = confusion(y_true, y_pred)?;
    Ok((f1(&c) + f1(&c.swapped())) / 2.0)
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half (the normalised Mann-Whitney U statistic).
pub fn auc(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(Error::argument("labels and scores differ in length"));
    }
    check_binary(y_true, "labels")?;
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::argument("scores must be finite"));
    }
    let n1 = y_true.iter().filter(|&&t| t == 1).count();
    let n0 = y_true.len() - n1;
    if n1 == 0 || n0 == 0 {
        return Err(Error::UndefinedMetric("AUC needs both classes present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum of the positives keeps tied mid-ranks integral.
    let mut twice_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let twice_mid = (start + 1 + end) as u128; // 2 * mean of ranks start+1..=end
        let pos = order[start..end].iter().filter(|&&i| y_true[i] == 1).count() as u128;
        twice_rank_sum += pos * twice_mid;
        start = end;
    }
    let twice_u = twice_rank_sum - (n1 as u128) * (n1 as u128 + 1);
    Ok(twice_u as f64 / 2.0 / (n1 as f64 * n0 as f64))
}

/// Macro-averaged AUC over the two one-vs-rest problems. For two classes
/// both terms equal the binary AUC.
pub fn macro_auc(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    auc(y_true, scores)
}
