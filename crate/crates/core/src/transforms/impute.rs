//! k-nearest-neighbour imputation with a missing-aware Euclidean distance.

use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Frame};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Uniform,
}

/// Reference copy of the (encoded, normalised) training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputerModel {
    pub k: usize,
    pub weighting: Weighting,
    pub columns: Vec<String>,
    /// Training rows over `columns`; `None` marks a masked cell.
    pub reference: Vec<Vec<Option<f64>>>,
    /// Mean of the observed training values per column (0 if none).
    pub column_means: Vec<f64>,
}

impl ImputerModel {
    /// Keeps only the named columns, in the given order.
    pub fn restrict(&self, features: &[String]) -> Result<ImputerModel> {
        let idx: Vec<usize> = features
            .iter()
            .map(|f| {
                self.columns
                    .iter()
                    .position(|c| c == f)
                    .ok_or_else(|| Error::schema(f, "column unknown to the imputer"))
            })
            .collect::<Result<_>>()?;
        Ok(ImputerModel {
            k: self.k,
            weighting: self.weighting,
            columns: features.to_vec(),
            reference: self
                .reference
                .iter()
                .map(|row| idx.iter().map(|&j| row[j]).collect())
                .collect(),
            column_means: idx.iter().map(|&j| self.column_means[j]).collect(),
        })
    }
}

/// Distance over the coordinates observed in both rows, scaled by
/// `m / shared`. `None` when the rows share no observed coordinate.
pub fn nan_euclidean(a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    let mut shared = 0usize;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            shared += 1;
            sum += (x - y) * (x - y);
        }
    }
    (shared > 0).then(|| (a.len() as f64 / shared as f64 * sum).sqrt())
}

fn feature_rows(frame: &Frame) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let cols = frame.feature_indices();
    for &j in &cols {
        if frame.schema()[j].kind != ColumnKind::Numeric {
            return Err(Error::schema(&frame.schema()[j].name, "imputation needs encoded numeric columns"));
        }
    }
    let names = cols.iter().map(|&j| frame.schema()[j].name.clone()).collect();
    let rows = (0..frame.n_rows())
        .map(|i| cols.iter().map(|&j| frame.value(i, j)).collect())
        .collect();
    Ok((names, rows))
}

pub fn knn_impute_fit(train: &Frame, k: usize) -> Result<ImputerModel> {
    if k < 1 {
        return Err(Error::argument("imputer needs k >= 1"));
    }
    if k > train.n_rows() {
        return Err(Error::argument(format!(
            "imputer k = {k} exceeds the {} training rows",
            train.n_rows()
        )));
    }
    let (columns, reference) = feature_rows(train)?;
    let column_means = (0..columns.len())
        .map(|j| {
            let (sum, n) = reference
                .iter()
                .filter_map(|r| r[j])
                .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
            if n > 0 {
                sum / n as f64
            } else {
                0.0
            }
        })
        .collect();
    Ok(ImputerModel {
        k,
        weighting: Weighting::Uniform,
        columns,
        reference,
        column_means,
    })
}

/// Fills every masked feature cell with the mean of that column over the k
/// nearest training rows observing it. Ties in distance go to the earlier
/// training row. Rows sharing no observed coordinate with any donor fall
/// back to the training column mean.
pub fn knn_impute_apply(frame: &Frame, model: &ImputerModel) -> Result<Frame> {
    let (names, rows) = feature_rows(frame)?;
    if names != model.columns {
        return Err(Error::schema(
            names.iter().find(|n| !model.columns.contains(n)).map_or("<order>", String::as_str),
            "frame columns differ from the imputer's columns",
        ));
    }
    let cols = frame.feature_indices();
    let mut out = frame.clone();
    let mut candidates: Vec<(f64, usize)> = Vec::with_capacity(model.reference.len());
    for (i, row) in rows.iter().enumerate() {
        if row.iter().all(Option::is_some) {
            continue;
        }
        let distances: Vec<Option<f64>> =
            model.reference.iter().map(|r| nan_euclidean(row, r)).collect();
        for (c, cell) in row.iter().enumerate() {
            if cell.is_some() {
                continue;
            }
            candidates.clear();
            candidates.extend(
                model
                    .reference
                    .iter()
                    .enumerate()
                    .filter_map(|(r, refrow)| match (distances[r], refrow[c]) {
                        (Some(d), Some(_)) => Some((d, r)),
                        _ => None,
                    }),
            );
            let value = if candidates.is_empty() {
                model.column_means[c]
            } else {
                let k = model.k.min(candidates.len());
                candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let sum: f64 = candidates[..k]
                    .iter()
                    .map(|&(_, r)| model.reference[r][c].expect("donor observes column"))
                    .sum();
                sum / k as f64
            };
            out.set_cell(i, cols[c], Some(value));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Cell, ColumnSpec};

    fn frame(rows: &[[Option<f64>; 2]]) -> Frame {
        let schema = vec![
            ColumnSpec::numeric("u"),
            ColumnSpec::numeric("v"),
            ColumnSpec::categorical("class", ["a"]),
        ];
        let rows = rows
            .iter()
            .map(|r| vec![Cell::from(r[0]), Cell::from(r[1]), "a".into()])
            .collect();
        Frame::from_cells(schema, "class", rows).unwrap()
    }

    #[test]
    fn imputes_mean_of_two_nearest() {
        let train = frame(&[[Some(1.0), Some(1.0)], [Some(3.0), Some(1.0)], [Some(9.0), Some(9.0)]]);
        let model = knn_impute_fit(&train, 2).unwrap();
        let out = knn_impute_apply(&frame(&[[Some(2.0), None]]), &model).unwrap();
        assert_eq!(out.value(0, 1), Some(1.0));
    }

    #[test]
    fn complete_frame_is_unchanged() {
        let train = frame(&[[Some(1.0), Some(1.0)], [Some(3.0), Some(1.0)]]);
        let model = knn_impute_fit(&train, 1).unwrap();
        assert_eq!(knn_impute_apply(&train, &model).unwrap(), train);
    }

    #[test]
    fn donors_without_shared_coordinates_fall_back_to_column_mean() {
        // Only row 0 observes `u`, and it shares nothing with the query.
        let train = frame(&[[Some(2.0), None], [None, Some(5.0)]]);
        let model = knn_impute_fit(&train, 1).unwrap();
        let out = knn_impute_apply(&frame(&[[None, Some(3.0)]]), &model).unwrap();
        assert_eq!(out.value(0, 0), Some(2.0));
    }

    #[test]
    fn invalid_k() {
        let train = frame(&[[Some(1.0), Some(1.0)]]);
        assert!(matches!(knn_impute_fit(&train, 0), Err(Error::Argument(_))));
        assert!(matches!(knn_impute_fit(&train, 2), Err(Error::Argument(_))));
    }

    #[test]
    fn distance_scales_by_shared_count() {
        let d = nan_euclidean(&[Some(0.0), None, Some(0.0)], &[Some(1.0), Some(5.0), None]).unwrap();
        assert!((d - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(nan_euclidean(&[None, Some(1.0)], &[Some(1.0), None]), None);
    }
}
