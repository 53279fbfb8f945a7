//! Row surgery on the training partition: LOF outlier removal followed by
//! SMOTE class balancing.

mod lof;
mod smote;

pub use lof::{detect_outliers, lof_scores, remove_outliers, LofConfig, LofOutcome, LofRule};
pub use smote::{smote, smote_detailed, SmoteConfig, SmoteOutcome};

/// Indices of the `k` nearest rows to `query` among `candidates`, nearest
/// first, ties broken by lower index. `query` itself is skipped.
pub(crate) fn nearest(
    rows: &crate::Matrix,
    query: usize,
    candidates: &[usize],
    k: usize,
) -> Vec<(f64, usize)> {
    let q = rows.row(query);
    let mut d: Vec<(f64, usize)> = candidates
        .iter()
        .filter(|&&c| c != query)
        .map(|&c| (crate::matrix::squared_euclidean(q, rows.row(c)), c))
        .collect();
    let k = k.min(d.len());
    if k < d.len() {
        d.select_nth_unstable_by(k, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.truncate(k);
    }
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().map(|(s, i)| (s.sqrt(), i)).collect()
}
