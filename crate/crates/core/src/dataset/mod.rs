//! Typed tabular frames, ingestion, cleaning and partitioning.
//!
//! A [`Frame`] stores every cell as an `f64` (category index for categorical
//! columns) next to a boolean missing mask. Masked cells always hold `0.0` so
//! that two frames with equal observed content compare equal.

mod arff;
mod csv_io;
mod repair;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

pub use arff::parse_arff;
pub use csv_io::{parse_csv, write_csv, write_csv_string};
pub use repair::{clean, clean_with, RepairTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    /// Allowed tokens, categorical columns only. Cells store an index into
    /// this list.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub unit: String,
}

impl ColumnSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        ColumnSpec {
            name: name.into(),
            kind: ColumnKind::Numeric,
            categories: Vec::new(),
            unit: String::new(),
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
    ) -> Self {
        ColumnSpec {
            name: name.into(),
            kind: ColumnKind::Categorical,
            categories: categories.into_iter().map(Into::into).collect(),
            unit: String::new(),
        }
    }

    pub fn is_categorical(&self) -> bool {
        self.kind == ColumnKind::Categorical
    }

    pub fn category_index(&self, token: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == token)
    }
}

/// One input cell, used to build frames by hand.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Cat(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        if v == "?" {
            Cell::Missing
        } else {
            Cell::Cat(v.to_string())
        }
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Arff,
    Csv,
}

impl DataFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("arff") => DataFormat::Arff,
            _ => DataFormat::Csv,
        }
    }
}

impl std::str::FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "arff" => Ok(DataFormat::Arff),
            "csv" => Ok(DataFormat::Csv),
            other => Err(Error::argument(format!("unknown data format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    schema: Vec<ColumnSpec>,
    values: Vec<f64>,
    missing: Vec<bool>,
    n_rows: usize,
    label: String,
}

impl Frame {
    /// Empty frame with the given schema. `label` must name a categorical
    /// column.
    pub fn empty(schema: Vec<ColumnSpec>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let mut seen = std::collections::HashSet::new();
        for col in &schema {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::schema(&col.name, "duplicate column name"));
            }
            if col.is_categorical() && col.categories.is_empty() {
                return Err(Error::schema(&col.name, "categorical column without categories"));
            }
        }
        match schema.iter().find(|c| c.name == label) {
            None => return Err(Error::schema(&label, "label column not in schema")),
            Some(c) if !c.is_categorical() => {
                return Err(Error::schema(&label, "label column must be categorical"))
            }
            _ => {}
        }
        Ok(Frame {
            schema,
            values: Vec::new(),
            missing: Vec::new(),
            n_rows: 0,
            label,
        })
    }

    /// Builds a frame from rows of [`Cell`]s.
    pub fn from_cells(
        schema: Vec<ColumnSpec>,
        label: impl Into<String>,
        rows: Vec<Vec<Cell>>,
    ) -> Result<Self> {
        let mut frame = Frame::empty(schema, label)?;
        for row in rows {
            frame.push_cells(row)?;
        }
        Ok(frame)
    }

    /// Builds a frame from a numeric feature matrix and class tokens.
    pub fn from_matrix(
        feature_names: &[String],
        x: &Matrix,
        label: &str,
        classes: &[String],
        y: &[usize],
    ) -> Result<Self> {
        if x.cols() != feature_names.len() || x.rows() != y.len() {
            return Err(Error::argument("feature names, matrix and labels disagree in shape"));
        }
        let mut schema: Vec<ColumnSpec> =
            feature_names.iter().map(ColumnSpec::numeric).collect();
        schema.push(ColumnSpec::categorical(label, classes.iter().cloned()));
        let mut frame = Frame::empty(schema, label)?;
        for (i, &class) in y.iter().enumerate() {
            if class >= classes.len() {
                return Err(Error::argument(format!("class index {class} out of range")));
            }
            let mut row = x.row(i).to_vec();
            row.push(class as f64);
            frame.push_raw(&row, &vec![false; row.len()])?;
        }
        Ok(frame)
    }

    pub fn push_cells(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.schema.len() {
            return Err(Error::argument(format!(
                "row has {} cells, schema has {} columns",
                row.len(),
                self.schema.len()
            )));
        }
        let mut values = Vec::with_capacity(row.len());
        let mut mask = Vec::with_capacity(row.len());
        for (cell, col) in row.into_iter().zip(&self.schema) {
            let (v, m) = match (cell, col.kind) {
                (Cell::Missing, _) => (0.0, true),
                (Cell::Num(v), ColumnKind::Numeric) => (v, false),
                (Cell::Cat(t), ColumnKind::Categorical) => match col.category_index(&t) {
                    Some(idx) => (idx as f64, false),
                    None => {
                        return Err(Error::schema(&col.name, format!("unknown category `{t}`")))
                    }
                },
                (Cell::Num(v), ColumnKind::Categorical) => {
                    return Err(Error::schema(&col.name, format!("numeric value {v} in categorical column")))
                }
                (Cell::Cat(t), ColumnKind::Numeric) => match t.parse::<f64>() {
                    Ok(v) => (v, false),
                    Err(_) => {
                        return Err(Error::schema(&col.name, format!("non-numeric token `{t}`")))
                    }
                },
            };
            values.push(v);
            mask.push(m);
        }
        self.push_raw(&values, &mask)
    }

    /// Appends a row of raw cell values (category indices for categorical
    /// columns) and its mask.
    pub fn push_raw(&mut self, values: &[f64], mask: &[bool]) -> Result<()> {
        let m = self.schema.len();
        if values.len() != m || mask.len() != m {
            return Err(Error::argument("row width does not match schema"));
        }
        let label_idx = self.label_index();
        if mask[label_idx] {
            return Err(Error::schema(&self.label, "label cell is missing"));
        }
        for (j, col) in self.schema.iter().enumerate() {
            if !mask[j] && col.is_categorical() {
                let v = values[j];
                if v.fract() != 0.0 || v < 0.0 || v as usize >= col.categories.len() {
                    return Err(Error::schema(&col.name, format!("category index {v} out of range")));
                }
            }
        }
        self.values
            .extend(values.iter().zip(mask).map(|(&v, &masked)| if masked { 0.0 } else { v }));
        self.missing.extend_from_slice(mask);
        self.n_rows += 1;
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn schema(&self) -> &[ColumnSpec] {
        &self.schema
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn label_index(&self) -> usize {
        self.column_index(&self.label).expect("label column is validated at construction")
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&ColumnSpec> {
        self.schema.iter().find(|c| c.name == name)
    }

    /// Column indices of every non-label column, in schema order.
    pub fn feature_indices(&self) -> Vec<usize> {
        let label = self.label_index();
        (0..self.schema.len()).filter(|&j| j != label).collect()
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.feature_indices()
            .into_iter()
            .map(|j| self.schema[j].name.clone())
            .collect()
    }

    #[inline]
    pub fn is_missing(&self, row: usize, col: usize) -> bool {
        self.missing[row * self.schema.len() + col]
    }

    /// Raw stored value, `None` when masked.
    #[inline]
    pub fn value(&self, row: usize, col: usize) -> Option<f64> {
        let k = row * self.schema.len() + col;
        (!self.missing[k]).then(|| self.values[k])
    }

    /// Category token of a categorical cell.
    pub fn category(&self, row: usize, col: usize) -> Option<&str> {
        let spec = &self.schema[col];
        if !spec.is_categorical() {
            return None;
        }
        self.value(row, col).map(|v| spec.categories[v as usize].as_str())
    }

    pub fn row_values(&self, row: usize) -> &[f64] {
        let m = self.schema.len();
        &self.values[row * m..(row + 1) * m]
    }

    pub fn row_mask(&self, row: usize) -> &[bool] {
        let m = self.schema.len();
        &self.missing[row * m..(row + 1) * m]
    }

    pub(crate) fn set_cell(&mut self, row: usize, col: usize, value: Option<f64>) {
        let k = row * self.schema.len() + col;
        match value {
            Some(v) => {
                self.values[k] = v;
                self.missing[k] = false;
            }
            None => {
                self.values[k] = 0.0;
                self.missing[k] = true;
            }
        }
    }

    pub(crate) fn schema_mut(&mut self) -> &mut Vec<ColumnSpec> {
        &mut self.schema
    }

    pub fn select_rows(&self, indices: &[usize]) -> Frame {
        let m = self.schema.len();
        let mut values = Vec::with_capacity(indices.len() * m);
        let mut missing = Vec::with_capacity(indices.len() * m);
        for &i in indices {
            values.extend_from_slice(self.row_values(i));
            missing.extend_from_slice(self.row_mask(i));
        }
        Frame {
            schema: self.schema.clone(),
            values,
            missing,
            n_rows: indices.len(),
            label: self.label.clone(),
        }
    }

    /// Keeps the named feature columns (in the given order) plus the label.
    pub fn project(&self, features: &[String]) -> Result<Frame> {
        let mut cols = Vec::with_capacity(features.len() + 1);
        for name in features {
            match self.column_index(name) {
                Some(j) if j != self.label_index() => cols.push(j),
                _ => return Err(Error::schema(name, "feature not present in frame")),
            }
        }
        cols.push(self.label_index());
        Ok(self.select_column_indices(&cols))
    }

    pub(crate) fn select_column_indices(&self, cols: &[usize]) -> Frame {
        let m = self.schema.len();
        let mut values = Vec::with_capacity(self.n_rows * cols.len());
        let mut missing = Vec::with_capacity(self.n_rows * cols.len());
        for i in 0..self.n_rows {
            for &j in cols {
                values.push(self.values[i * m + j]);
                missing.push(self.missing[i * m + j]);
            }
        }
        Frame {
            schema: cols.iter().map(|&j| self.schema[j].clone()).collect(),
            values,
            missing,
            n_rows: self.n_rows,
            label: self.label.clone(),
        }
    }

    /// Feature columns as a dense matrix. Fails on masked cells and on
    /// categorical columns that have not been encoded yet.
    pub fn feature_matrix(&self) -> Result<Matrix> {
        let cols = self.feature_indices();
        for &j in &cols {
            if self.schema[j].is_categorical() {
                return Err(Error::schema(&self.schema[j].name, "categorical column must be encoded first"));
            }
        }
        let mut data = Vec::with_capacity(self.n_rows * cols.len());
        for i in 0..self.n_rows {
            for &j in &cols {
                match self.value(i, j) {
                    Some(v) => data.push(v),
                    None => {
                        return Err(Error::Contract(format!(
                            "masked cell at row {i}, column `{}`",
                            self.schema[j].name
                        )))
                    }
                }
            }
        }
        Matrix::from_vec(self.n_rows, cols.len(), data)
    }

    /// Class index per row (index into the label column's categories).
    pub fn class_indices(&self) -> Vec<usize> {
        let l = self.label_index();
        (0..self.n_rows).map(|i| self.values[i * self.schema.len() + l] as usize).collect()
    }

    pub fn classes(&self) -> &[String] {
        &self.schema[self.label_index()].categories
    }

    /// Binary targets with `positive` mapped to 1.
    pub fn targets(&self, positive: &str) -> Result<Vec<u8>> {
        let spec = &self.schema[self.label_index()];
        let pos = spec
            .category_index(positive)
            .ok_or_else(|| Error::schema(&self.label, format!("positive class `{positive}` not among categories")))?;
        Ok(self.class_indices().into_iter().map(|c| u8::from(c == pos)).collect())
    }

    /// Row count per class token, including classes with zero rows.
    pub fn class_counts(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> =
            self.classes().iter().map(|c| (c.clone(), 0)).collect();
        for c in self.class_indices() {
            *counts.get_mut(&self.classes()[c]).expect("known class") += 1;
        }
        counts
    }

    pub(crate) fn fingerprint(&self) -> Vec<u64> {
        self.values
            .iter()
            .zip(&self.missing)
            .map(|(v, &m)| if m { u64::MAX } else { v.to_bits() })
            .collect()
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({} rows x {} columns, label `{}`)", self.n_rows, self.n_cols(), self.label)
    }
}

/// Reads an ARFF-subset or CSV file with the built-in repair table.
pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Frame> {
    load_dataset_with(path, format, &RepairTable::default())
}

pub fn load_dataset_with(
    path: impl AsRef<Path>,
    format: DataFormat,
    table: &RepairTable,
) -> Result<Frame> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingData(path.to_path_buf()));
    }
    // UTF-8 or plain ASCII; stray Latin-1 bytes (only ever in comments) are
    // replaced rather than rejected.
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let name = path.display().to_string();
    match format {
        DataFormat::Arff => parse_arff(&text, &name, table),
        DataFormat::Csv => parse_csv(&text, table),
    }
}

/// Loads and cleans in one step.
pub fn ingest(path: impl AsRef<Path>, format: DataFormat, table: &RepairTable) -> Result<Frame> {
    let raw = load_dataset_with(path, format, table)?;
    clean_with(&raw, table)
}

/// Number of masked feature cells (the label never counts).
pub fn count_missing(frame: &Frame) -> usize {
    let features = frame.feature_indices();
    (0..frame.n_rows())
        .map(|i| features.iter().filter(|&&j| frame.is_missing(i, j)).count())
        .sum()
}

/// Pairs `(i, j)`, `i < j`, of rows identical in every cell and mask bit.
pub fn find_duplicates(frame: &Frame) -> Vec<(usize, usize)> {
    let m = frame.n_cols();
    let key = frame.fingerprint();
    let mut groups: HashMap<&[u64], Vec<usize>> = HashMap::new();
    for i in 0..frame.n_rows() {
        groups.entry(&key[i * m..(i + 1) * m]).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = groups
        .values()
        .flat_map(|rows| {
            rows.iter()
                .enumerate()
                .flat_map(move |(a, &i)| rows[a + 1..].iter().map(move |&j| (i, j)))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Frame,
    pub test: Frame,
    pub seed: u64,
    pub ratio: f64,
    /// Original row index of every train row, in train order.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

fn check_ratio(frame: &Frame, ratio: f64) -> Result<()> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::argument(format!("split ratio must lie in (0, 1), got {ratio}")));
    }
    if frame.n_rows() == 0 {
        return Err(Error::argument("cannot split an empty frame"));
    }
    Ok(())
}

fn split_at(frame: &Frame, order: Vec<usize>, n_train: usize, ratio: f64, seed: u64) -> SplitPair {
    let (train_rows, test_rows) = order.split_at(n_train);
    SplitPair {
        train: frame.select_rows(train_rows),
        test: frame.select_rows(test_rows),
        seed,
        ratio,
        train_rows: train_rows.to_vec(),
        test_rows: test_rows.to_vec(),
    }
}

/// Shuffles rows with a generator seeded by `seed` and sends the first
/// `round(ratio * n)` to the training partition.
pub fn split(frame: &Frame, ratio: f64, seed: u64) -> Result<SplitPair> {
    check_ratio(frame, ratio)?;
    let n = frame.n_rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let n_train = (ratio * n as f64).round() as usize;
    Ok(split_at(frame, order, n_train, ratio, seed))
}

/// Class-preserving variant of [`split`]: each class contributes
/// `round(ratio * n_class)` rows to training, so the train size may differ
/// from `round(ratio * n)` by the number of classes.
pub fn split_stratified(frame: &Frame, ratio: f64, seed: u64) -> Result<SplitPair> {
    check_ratio(frame, ratio)?;
    let mut rng = seed::rng(seed);
    let classes = frame.class_indices();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for c in 0..frame.classes().len() {
        let mut members: Vec<usize> = (0..frame.n_rows()).filter(|&i| classes[i] == c).collect();
        members.shuffle(&mut rng);
        let k = (ratio * members.len() as f64).round() as usize;
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    let n_train = train.len();
    train.extend(test);
    Ok(split_at(frame, train, n_train, ratio, seed))
}

/// Long name of a kidney-data attribute code (`sc` -> "Serum Creatinine").
pub fn attribute_name(code: &str) -> Option<&'static str> {
    Some(match code {
        "age" => "Age",
        "bp" => "Blood Pressure",
        "sg" => "Specific Gravity",
        "al" => "Albumin",
        "su" => "Sugar",
        "rbc" => "Red Blood Cells",
        "pc" => "Pus Cell",
        "pcc" => "Pus Cell Clumps",
        "ba" => "Bacteria",
        "bgr" => "Blood Glucose Random",
        "bu" => "Blood Urea",
        "sc" => "Serum Creatinine",
        "sod" => "Sodium",
        "pot" => "Potassium",
        "hemo" => "Hemoglobin",
        "pcv" => "Packed Cell Volume",
        "wc" => "White Blood Cell Count",
        "rc" => "Red Blood Cell Count",
        "htn" => "Hypertension",
        "dm" => "Diabetes Mellitus",
        "cad" => "Coronary Artery Disease",
        "appet" => "Appetite",
        "pe" => "Pedal Edema",
        "ane" => "Anemia",
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy_frame() -> Frame {
        let schema = vec![
            ColumnSpec::numeric("a"),
            ColumnSpec::categorical("b", ["no", "yes"]),
            ColumnSpec::categorical("class", ["ckd", "notckd"]),
        ];
        Frame::from_cells(
            schema,
            "class",
            vec![
                vec![1.0.into(), "yes".into(), "ckd".into()],
                vec![Cell::Missing, "no".into(), "notckd".into()],
                vec![3.0.into(), "?".into(), "ckd".into()],
                vec![1.0.into(), "yes".into(), "ckd".into()],
            ],
        )
        .unwrap()
    }

    #[test]
    fn missing_count_ignores_label() {
        assert_eq!(count_missing(&toy_frame()), 2);
    }

    #[test]
    fn no_masked_cells_counts_zero() {
        let f = toy_frame().select_rows(&[0, 3]);
        assert_eq!(count_missing(&f), 0);
    }

    #[test]
    fn single_row_with_three_masked_cells() {
        let mut schema: Vec<ColumnSpec> = (0..24).map(|j| ColumnSpec::numeric(format!("f{j}"))).collect();
        schema.push(ColumnSpec::categorical("class", ["ckd", "notckd"]));
        let mut row: Vec<Cell> = (0..24).map(|j| Cell::Num(j as f64)).collect();
        row[2] = Cell::Missing;
        row[9] = Cell::Missing;
        row[17] = Cell::Missing;
        row.push("ckd".into());
        let f = Frame::from_cells(schema, "class", vec![row]).unwrap();
        assert_eq!(count_missing(&f), 3);
    }

    #[test]
    fn repeated_row_is_one_duplicate_pair() {
        assert_eq!(find_duplicates(&toy_frame()), vec![(0, 3)]);
    }

    #[test]
    fn mask_bit_participates_in_row_identity() {
        let schema = vec![
            ColumnSpec::numeric("a"),
            ColumnSpec::categorical("class", ["x", "y"]),
        ];
        // Same stored value (masked cells hold 0.0) but different mask.
        let f = Frame::from_cells(
            schema,
            "class",
            vec![vec![0.0.into(), "x".into()], vec![Cell::Missing, "x".into()]],
        )
        .unwrap();
        assert!(find_duplicates(&f).is_empty());
    }

    #[test]
    fn label_must_be_present() {
        let schema = vec![ColumnSpec::numeric("a"), ColumnSpec::categorical("class", ["x"])];
        let err = Frame::from_cells(schema, "class", vec![vec![1.0.into(), Cell::Missing]]);
        assert!(matches!(err, Err(Error::Schema { .. })));
    }

    #[test]
    fn split_sizes_and_determinism() {
        let mut schema = vec![ColumnSpec::numeric("a")];
        schema.push(ColumnSpec::categorical("class", ["ckd", "notckd"]));
        let rows = (0..400)
            .map(|i| vec![Cell::Num(i as f64), if i < 250 { "ckd" } else { "notckd" }.into()])
            .collect();
        let f = Frame::from_cells(schema, "class", rows).unwrap();
        let a = split(&f, 0.75, 11).unwrap();
        assert_eq!((a.train.n_rows(), a.test.n_rows()), (300, 100));
        let b = split(&f, 0.75, 11).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test_rows, b.test_rows);
        assert!(matches!(split(&f, 1.0, 1), Err(Error::Argument(_))));
        assert!(matches!(split(&f, 0.0, 1), Err(Error::Argument(_))));
        assert!(matches!(split(&f, f64::NAN, 1), Err(Error::Argument(_))));

        let s = split_stratified(&f, 0.75, 3).unwrap();
        let counts = s.train.class_counts();
        assert_eq!(counts["ckd"], 188);
        assert_eq!(counts["notckd"], 113);
    }

    #[test]
    fn projection_keeps_label_and_order() {
        let f = toy_frame();
        let p = f.project(&["b".to_string()]).unwrap();
        assert_eq!(p.feature_names(), vec!["b"]);
        assert_eq!(p.label(), "class");
        assert!(f.project(&["zzz".to_string()]).is_err());
        assert!(f.project(&["class".to_string()]).is_err());
    }
}

