use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Frame};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMoments {
    pub name: String,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardParams {
    pub columns: Vec<ColumnMoments>,
}

impl StandardParams {
    pub fn restrict(&self, features: &[String]) -> StandardParams {
        StandardParams {
            columns: self.columns.iter().filter(|c| features.contains(&c.name)).cloned().collect(),
        }
    }
}

// Standard deviations this small relative to the mean are rounding noise
// from a constant column.
fn is_degenerate(m: &ColumnMoments) -> bool {
    m.std <= 1e-12 * m.mean.abs().max(1.0)
}

fn observed_column(frame: &Frame, j: usize) -> Result<Vec<f64>> {
    let spec = &frame.schema()[j];
    if spec.kind != ColumnKind::Numeric {
        return Err(Error::schema(&spec.name, "standardization needs numeric columns"));
    }
    (0..frame.n_rows())
        .map(|i| {
            frame.value(i, j).ok_or_else(|| {
                Error::Contract(format!("masked cell at row {i}, column `{}`; impute before standardizing", spec.name))
            })
        })
        .collect()
}

pub fn standard_fit(train: &Frame) -> Result<StandardParams> {
    let mut columns = Vec::new();
    for j in train.feature_indices() {
        let xs = observed_column(train, j)?;
        let n = xs.len().max(1) as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        columns.push(ColumnMoments {
            name: train.schema()[j].name.clone(),
            mean,
            std: var.sqrt(),
        });
    }
    Ok(StandardParams { columns })
}

/// `(x - mean) / std`; constant columns map to 0.
pub fn standard_apply(frame: &Frame, params: &StandardParams) -> Result<Frame> {
    let mut out = frame.clone();
    for j in frame.feature_indices() {
        let name = &frame.schema()[j].name;
        let m = params
            .columns
            .iter()
            .find(|c| &c.name == name)
            .ok_or_else(|| Error::schema(name, "column has no fitted moments"))?;
        let xs = observed_column(frame, j)?;
        for (i, x) in xs.into_iter().enumerate() {
            let z = if is_degenerate(m) { 0.0 } else { (x - m.mean) / m.std };
            out.set_cell(i, j, Some(z));
        }
    }
    Ok(out)
}
