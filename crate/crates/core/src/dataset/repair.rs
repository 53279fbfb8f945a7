//! Data-driven typo repair and type coercion for the kidney-disease table.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ColumnKind, Frame};
use crate::error::{Error, Result};

/// Repair rules applied by [`clean_with`]. The defaults describe the UCI
/// chronic kidney disease file (both the ARFF release and the common CSV
/// export); every field can be overridden from the experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepairTable {
    /// Header names recognised as the class column, in priority order.
    pub label_names: Vec<String>,
    /// Column renames applied before anything else (`wbcc` -> `wc`).
    pub column_aliases: BTreeMap<String, String>,
    /// Columns removed by cleaning (row ids, blank index headers).
    pub drop_columns: Vec<String>,
    /// Token rewrites applied to category names after trimming.
    pub token_map: BTreeMap<String, String>,
    /// Columns that are measurements even when a file declares them nominal.
    pub numeric_columns: Vec<String>,
    /// Allowed categories per categorical column.
    pub categories: BTreeMap<String, Vec<String>>,
    pub units: BTreeMap<String, String>,
}

fn map<const N: usize>(pairs: [(&str, &str); N]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

impl Default for RepairTable {
    fn default() -> Self {
        let yes_no = || vec!["no".to_string(), "yes".to_string()];
        let normal = || vec!["abnormal".to_string(), "normal".to_string()];
        let present = || vec!["notpresent".to_string(), "present".to_string()];
        let mut categories = BTreeMap::new();
        categories.insert("rbc".into(), normal());
        categories.insert("pc".into(), normal());
        categories.insert("pcc".into(), present());
        categories.insert("ba".into(), present());
        for c in ["htn", "dm", "cad", "pe", "ane"] {
            categories.insert(c.into(), yes_no());
        }
        categories.insert("appet".into(), vec!["good".into(), "poor".into()]);
        categories.insert("class".into(), vec!["ckd".into(), "notckd".into()]);

        RepairTable {
            label_names: vec!["class".into(), "classification".into()],
            column_aliases: map([
                ("wbcc", "wc"),
                ("rbcc", "rc"),
                ("classification", "class"),
            ]),
            drop_columns: vec!["id".into(), "".into()],
            // Whitespace variants seen in the public exports. Trimming already
            // covers them; they stay listed so the table documents the data.
            token_map: map([
                ("ckd\t", "ckd"),
                ("ckd.", "ckd"),
                ("\tno", "no"),
                ("\tyes", "yes"),
                (" yes", "yes"),
                ("no ", "no"),
                ("\t?", "?"),
            ]),
            numeric_columns: ["pcv", "wc", "rc", "sg", "al", "su"].map(String::from).to_vec(),
            categories,
            units: map([
                ("age", "years"),
                ("bp", "mm/Hg"),
                ("bgr", "mgs/dl"),
                ("bu", "mgs/dl"),
                ("sc", "mgs/dl"),
                ("sod", "mEq/L"),
                ("pot", "mEq/L"),
                ("hemo", "gms"),
                ("wc", "cells/cumm"),
                ("rc", "millions/cmm"),
            ]),
        }
    }
}

impl RepairTable {
    /// Canonical form of a raw category token; `None` means missing.
    pub fn repair_token(&self, token: &str) -> Option<String> {
        let fixed = match self.token_map.get(token) {
            Some(t) => t.trim().to_string(),
            None => {
                let trimmed = token.trim();
                self.token_map.get(trimmed).map_or(trimmed, |t| t.trim()).to_string()
            }
        };
        (fixed != "?" && !fixed.is_empty()).then_some(fixed)
    }

    /// Whether `token` in `column` would survive cleaning.
    pub(crate) fn is_repairable(&self, column: &str, token: &str) -> bool {
        let column = self.column_aliases.get(column).map_or(column, String::as_str);
        let Some(fixed) = self.repair_token(token) else {
            return true;
        };
        if self.numeric_columns.iter().any(|c| c == column) {
            return true;
        }
        match self.categories.get(column) {
            Some(allowed) => allowed.contains(&fixed),
            None => false,
        }
    }

    pub(crate) fn canonical_name<'a>(&'a self, name: &'a str) -> &'a str {
        self.column_aliases.get(name).map_or(name, String::as_str)
    }
}

/// [`clean_with`] using the built-in table.
pub fn clean(frame: &Frame) -> Result<Frame> {
    clean_with(frame, &RepairTable::default())
}

/// Renames and drops columns, repairs category tokens, coerces measurement
/// columns to numeric and sorts every category list. Idempotent.
pub fn clean_with(frame: &Frame, table: &RepairTable) -> Result<Frame> {
    // 1. renames and drops
    let mut keep = Vec::new();
    for (j, col) in frame.schema().iter().enumerate() {
        let name = table.canonical_name(&col.name);
        if table.drop_columns.iter().any(|d| d == name || d == &col.name) {
            if j == frame.label_index() {
                return Err(Error::schema(&col.name, "label column listed in drop_columns"));
            }
            continue;
        }
        keep.push(j);
    }
    let mut out = frame.select_column_indices(&keep);
    let new_label = table.canonical_name(frame.label()).to_string();
    for col in out.schema_mut() {
        col.name = table.canonical_name(&col.name).to_string();
    }
    out.label = new_label;
    {
        let mut seen = BTreeSet::new();
        for col in out.schema() {
            if !seen.insert(col.name.clone()) {
                return Err(Error::schema(&col.name, "duplicate column after renaming"));
            }
        }
    }

    let label_idx = out.label_index();
    for j in 0..out.n_cols() {
        let spec = out.schema()[j].clone();
        if spec.kind != ColumnKind::Categorical {
            if let Some(unit) = table.units.get(&spec.name) {
                out.schema_mut()[j].unit = unit.clone();
            }
            continue;
        }
        // 2. token repair: old index -> repaired token (None = missing)
        let repaired: Vec<Option<String>> =
            spec.categories.iter().map(|c| table.repair_token(c)).collect();

        let coerce = j != label_idx && table.numeric_columns.iter().any(|c| c == &spec.name);
        if coerce {
            // 3. nominal measurement -> numeric; unparseable tokens become missing
            let parsed: Vec<Option<f64>> = repaired
                .iter()
                .map(|t| t.as_deref().and_then(|t| t.parse::<f64>().ok()))
                .collect();
            for i in 0..out.n_rows() {
                if let Some(v) = out.value(i, j) {
                    out.set_cell(i, j, parsed[v as usize]);
                }
            }
            let col = &mut out.schema_mut()[j];
            col.kind = ColumnKind::Numeric;
            col.categories.clear();
            if let Some(unit) = table.units.get(&col.name) {
                col.unit = unit.clone();
            }
            continue;
        }

        // 4. validate used tokens, build the sorted category list
        let mut used = BTreeSet::new();
        for i in 0..out.n_rows() {
            if let Some(v) = out.value(i, j) {
                if let Some(t) = &repaired[v as usize] {
                    used.insert(t.clone());
                }
            }
        }
        let categories: Vec<String> = match table.categories.get(&spec.name) {
            Some(allowed) => {
                if let Some(bad) = used.iter().find(|t| !allowed.contains(t)) {
                    return Err(Error::schema(&spec.name, format!("unrepairable token `{bad}`")));
                }
                let mut all: Vec<String> = allowed.clone();
                all.sort();
                all.dedup();
                all
            }
            None => used.into_iter().collect(),
        };
        if categories.is_empty() {
            return Err(Error::schema(&spec.name, "no categories left after cleaning"));
        }
        let remap: Vec<Option<f64>> = repaired
            .iter()
            .map(|t| {
                t.as_ref()
                    .map(|t| categories.iter().position(|c| c == t).expect("validated") as f64)
            })
            .collect();
        for i in 0..out.n_rows() {
            if let Some(v) = out.value(i, j) {
                let new = remap[v as usize];
                if new.is_none() && j == label_idx {
                    return Err(Error::schema(&spec.name, "label cell repaired to missing"));
                }
                out.set_cell(i, j, new);
            }
        }
        let col = &mut out.schema_mut()[j];
        col.categories = categories;
        if let Some(unit) = table.units.get(&col.name) {
            col.unit = unit.clone();
        }
    }
    Ok(out)
}
