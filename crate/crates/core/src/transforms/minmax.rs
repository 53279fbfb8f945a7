use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Frame};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

/// Training-set minimum and maximum of every numeric feature column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxParams {
    pub columns: Vec<ColumnRange>,
}

impl MinMaxParams {
    pub fn get(&self, name: &str) -> Option<&ColumnRange> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn restrict(&self, features: &[String]) -> MinMaxParams {
        MinMaxParams {
            columns: self.columns.iter().filter(|c| features.contains(&c.name)).cloned().collect(),
        }
    }
}

/// Masked cells are ignored; a column with no observed value gets the
/// degenerate range `[0, 0]`.
pub fn minmax_fit(train: &Frame) -> Result<MinMaxParams> {
    let mut columns = Vec::new();
    for j in train.feature_indices() {
        let spec = &train.schema()[j];
        if spec.kind != ColumnKind::Numeric {
            continue;
        }
        let (min, max) = (0..train.n_rows())
            .filter_map(|i| train.value(i, j))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let (min, max) = if min.is_finite() { (min, max) } else { (0.0, 0.0) };
        columns.push(ColumnRange {
            name: spec.name.clone(),
            min,
            max,
        });
    }
    Ok(MinMaxParams { columns })
}

/// `(x - min) / (max - min)` on every observed cell, without clipping.
/// Degenerate columns map to 0.
pub fn minmax_apply(frame: &Frame, params: &MinMaxParams) -> Result<Frame> {
    let mut out = frame.clone();
    for j in frame.feature_indices() {
        let spec = &frame.schema()[j];
        if spec.kind != ColumnKind::Numeric {
            continue;
        }
        let range = params
            .get(&spec.name)
            .ok_or_else(|| Error::schema(&spec.name, "column has no fitted min-max range"))?;
        let width = range.max - range.min;
        for i in 0..frame.n_rows() {
            if let Some(x) = frame.value(i, j) {
                let scaled = if width > 0.0 { (x - range.min) / width } else { 0.0 };
                out.set_cell(i, j, Some(scaled));
            }
        }
    }
    Ok(out)
}
