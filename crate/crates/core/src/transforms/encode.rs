use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Frame};
use crate::error::{Error, Result};

/// Per categorical column, the 0/1 code of each token.
///
/// Tokens are ordered lexicographically and coded 0 then 1, which yields the
/// usual clinical orientation on the kidney data (`abnormal`/`normal`,
/// `notpresent`/`present`, `no`/`yes`, `good`/`poor`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderMap {
    pub columns: BTreeMap<String, BTreeMap<String, u8>>,
}

impl EncoderMap {
    pub fn restrict(&self, features: &[String]) -> EncoderMap {
        EncoderMap {
            columns: self
                .columns
                .iter()
                .filter(|(name, _)| features.contains(name))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

pub fn onehot_fit(train: &Frame) -> Result<EncoderMap> {
    let mut columns = BTreeMap::new();
    for j in train.feature_indices() {
        let spec = &train.schema()[j];
        if spec.kind != ColumnKind::Categorical {
            continue;
        }
        let mut tokens = spec.categories.clone();
        tokens.sort();
        tokens.dedup();
        if tokens.len() > 2 {
            return Err(Error::schema(
                &spec.name,
                format!("{} categories; only binary columns can be encoded", tokens.len()),
            ));
        }
        let codes = tokens.into_iter().zip(0u8..).collect();
        columns.insert(spec.name.clone(), codes);
    }
    Ok(EncoderMap { columns })
}

pub fn onehot_apply(frame: &Frame, map: &EncoderMap) -> Result<Frame> {
    let mut out = frame.clone();
    for j in frame.feature_indices() {
        let spec = &frame.schema()[j];
        if spec.kind != ColumnKind::Categorical {
            continue;
        }
        let codes = map
            .columns
            .get(&spec.name)
            .ok_or_else(|| Error::schema(&spec.name, "categorical column not covered by encoder"))?;
        let lookup: Vec<Option<u8>> = spec.categories.iter().map(|t| codes.get(t).copied()).collect();
        for i in 0..frame.n_rows() {
            if let Some(v) = frame.value(i, j) {
                let code = lookup[v as usize].ok_or_else(|| Error::Encoding {
                    column: spec.name.clone(),
                    token: spec.categories[v as usize].clone(),
                })?;
                out.set_cell(i, j, Some(f64::from(code)));
            }
        }
        let col = &mut out.schema_mut()[j];
        col.kind = ColumnKind::Numeric;
        col.categories.clear();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Cell, ColumnSpec};

    fn frame() -> Frame {
        let schema = vec![
            ColumnSpec::categorical("htn", ["no", "yes"]),
            ColumnSpec::categorical("appet", ["good", "poor"]),
            ColumnSpec::categorical("pc", ["abnormal", "normal"]),
            ColumnSpec::numeric("sc"),
            ColumnSpec::categorical("class", ["ckd", "notckd"]),
        ];
        Frame::from_cells(
            schema,
            "class",
            vec![
                vec!["yes".into(), "poor".into(), Cell::Missing, 1.2.into(), "ckd".into()],
                vec!["no".into(), "good".into(), "normal".into(), 0.8.into(), "notckd".into()],
            ],
        )
        .unwrap()
    }

    #[test]
    fn table_orientation() {
        let f = frame();
        let map = onehot_fit(&f).unwrap();
        let e = onehot_apply(&f, &map).unwrap();
        assert_eq!(e.value(0, 0), Some(1.0)); // htn yes
        assert_eq!(e.value(1, 0), Some(0.0)); // htn no
        assert_eq!(e.value(0, 1), Some(1.0)); // appet poor
        assert_eq!(e.value(1, 1), Some(0.0)); // appet good
        assert_eq!(e.value(1, 2), Some(1.0)); // pc normal
        assert!(e.is_missing(0, 2));
        assert_eq!(e.value(0, 3), Some(1.2));
        assert_eq!(e.category(0, e.label_index()), Some("ckd"));
    }

    #[test]
    fn unseen_token_is_an_encoding_error() {
        let f = frame();
        let mut map = onehot_fit(&f).unwrap();
        map.columns.get_mut("htn").unwrap().remove("yes");
        match onehot_apply(&f, &map) {
            Err(Error::Encoding { column, token }) => {
                assert_eq!((column.as_str(), token.as_str()), ("htn", "yes"));
            }
            other => panic!("expected encoding error, got {other:?}"),
        }
    }

    #[test]
    fn multi_category_columns_are_rejected() {
        let schema = vec![
            ColumnSpec::categorical("x", ["a", "b", "c"]),
            ColumnSpec::categorical("class", ["p"]),
        ];
        let f = Frame::from_cells(schema, "class", vec![]).unwrap();
        assert!(onehot_fit(&f).is_err());
    }
}
