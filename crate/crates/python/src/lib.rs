//! Python bindings: load and split the data, fit pipelines, select features,
//! train and score models, and run the full experiment.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyFileNotFoundError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use leakless::dataset::{self, DataFormat, RepairTable};
use leakless::evaluate::{self, MetricReport};
use leakless::experiment::{self, ExperimentConfig, PaperTable};
use leakless::feature_select::{self, SelectionConfig, SelectionReport};
use leakless::models::{self, Algorithm, ModelParams, ModelSpec};
use leakless::transforms::{self, StageSpec};
use leakless::{Error, Matrix};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::MissingData(_) => PyFileNotFoundError::new_err(e.to_string()),
        Error::Io(_) | Error::State(_) | Error::Contract(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

/// A table of cells with a class column.
#[pyclass(name = "Frame", module = "leakless_py")]
struct PyFrame {
    inner: dataset::Frame,
}

#[pymethods]
impl PyFrame {
    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names()
    }

    #[getter]
    fn classes(&self) -> Vec<String> {
        self.inner.classes().to_vec()
    }

    fn class_counts(&self) -> BTreeMap<String, usize> {
        self.inner.class_counts()
    }

    fn count_missing(&self) -> usize {
        dataset::count_missing(&self.inner)
    }

    fn find_duplicates(&self) -> Vec<(usize, usize)> {
        dataset::find_duplicates(&self.inner)
    }

    fn project(&self, features: Vec<String>) -> PyResult<PyFrame> {
        Ok(PyFrame {
            inner: self.inner.project(&features).map_err(py_err)?,
        })
    }

    /// Feature values as row lists; fails while cells are missing or
    /// categorical.
    fn to_rows(&self) -> PyResult<Vec<Vec<f64>>> {
        let x = self.inner.feature_matrix().map_err(py_err)?;
        Ok(x.iter_rows().map(|r| r.to_vec()).collect())
    }

    fn targets(&self, positive: &str) -> PyResult<Vec<u8>> {
        self.inner.targets(positive).map_err(py_err)
    }

    fn to_csv(&self) -> PyResult<String> {
        dataset::write_csv_string(&self.inner).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.n_rows()
    }

    fn __repr__(&self) -> String {
        format!("Frame(rows={}, features={})", self.inner.n_rows(), self.inner.feature_names().len())
    }
}

/// Reads and cleans an ARFF or CSV file. The format follows the extension
/// unless given ("arff" / "csv").
#[pyfunction]
#[pyo3(signature = (path, format=None))]
fn load_dataset(path: PathBuf, format: Option<&str>) -> PyResult<PyFrame> {
    let format = match format {
        Some(f) => parse::<DataFormat>(f)?,
        None => DataFormat::from_path(&path),
    };
    let inner = dataset::ingest(&path, format, &RepairTable::default()).map_err(py_err)?;
    Ok(PyFrame { inner })
}

/// Shuffled train/test split; returns `(train, test)`.
#[pyfunction]
#[pyo3(signature = (frame, ratio=0.75, seed=0, stratified=false))]
fn split(frame: &PyFrame, ratio: f64, seed: u64, stratified: bool) -> PyResult<(PyFrame, PyFrame)> {
    let pair = if stratified {
        dataset::split_stratified(&frame.inner, ratio, seed)
    } else {
        dataset::split(&frame.inner, ratio, seed)
    }
    .map_err(py_err)?;
    Ok((PyFrame { inner: pair.train }, PyFrame { inner: pair.test }))
}

/// Encode, min-max, impute (and optionally standardize) fitted on one frame.
#[pyclass(name = "FittedPipeline", module = "leakless_py")]
struct PyPipeline {
    inner: transforms::FittedPipeline,
}

#[pymethods]
impl PyPipeline {
    #[staticmethod]
    #[pyo3(signature = (train, k_impute=5, standardize=false))]
    fn fit(train: &PyFrame, k_impute: usize, standardize: bool) -> PyResult<Self> {
        let mut stages = transforms::preparation_stages(k_impute);
        if standardize {
            stages.push(StageSpec::Standardize);
        }
        let inner = transforms::pipeline_fit(&train.inner, &stages).map_err(py_err)?;
        Ok(PyPipeline { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPipeline {
            inner: transforms::FittedPipeline::from_json(text).map_err(py_err)?,
        })
    }

    fn apply(&self, frame: &PyFrame) -> PyResult<PyFrame> {
        Ok(PyFrame {
            inner: transforms::pipeline_apply(&frame.inner, &self.inner).map_err(py_err)?,
        })
    }

    fn project(&self, features: Vec<String>) -> PyResult<PyPipeline> {
        Ok(PyPipeline {
            inner: self.inner.project(&features).map_err(py_err)?,
        })
    }

    #[getter]
    fn stages(&self) -> Vec<&'static str> {
        self.inner.stage_names()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }
}

/// Local outlier factor of every row against its `k` nearest neighbours.
#[pyfunction]
#[pyo3(signature = (rows, k=20))]
fn lof_scores(rows: Vec<Vec<f64>>, k: usize) -> PyResult<Vec<f64>> {
    let x = Matrix::from_rows(&rows).map_err(py_err)?;
    leakless::resample::lof_scores(&x, k).map_err(py_err)
}

/// Oversamples the minority class of a fully numeric frame.
#[pyfunction]
#[pyo3(signature = (frame, k=5, seed=0))]
fn smote(frame: &PyFrame, k: usize, seed: u64) -> PyResult<PyFrame> {
    let cfg = leakless::resample::SmoteConfig { k, target: None, seed };
    Ok(PyFrame {
        inner: leakless::resample::smote(&frame.inner, &cfg).map_err(py_err)?,
    })
}

#[pyclass(name = "SelectionReport", module = "leakless_py")]
struct PySelection {
    inner: SelectionReport,
}

#[pymethods]
impl PySelection {
    #[getter]
    fn f1(&self) -> Vec<String> {
        self.inner.sets.f1.iter().cloned().collect()
    }

    #[getter]
    fn f2(&self) -> Vec<String> {
        self.inner.sets.f2.iter().cloned().collect()
    }

    #[getter]
    fn f3(&self) -> Vec<String> {
        self.inner.sets.f3.iter().cloned().collect()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    fn to_markdown(&self) -> String {
        self.inner.to_markdown()
    }
}

/// Hybrid feature selection on a prepared (numeric, complete) frame.
/// `config` is a JSON object overriding the selection defaults.
#[pyfunction]
#[pyo3(signature = (frame, positive="ckd", seed=0, config=None))]
fn select_features(frame: &PyFrame, positive: &str, seed: u64, config: Option<&str>) -> PyResult<PySelection> {
    let cfg: SelectionConfig = match config {
        Some(text) => serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => SelectionConfig::default(),
    };
    let inner = feature_select::select_features(&frame.inner, positive, &cfg, seed).map_err(py_err)?;
    Ok(PySelection { inner })
}

#[pyclass(name = "TrainedModel", module = "leakless_py")]
struct PyModel {
    inner: models::TrainedModel,
}

#[pymethods]
impl PyModel {
    /// Fits `algorithm` (e.g. "rforest", "svm_rbf") with its published
    /// hyperparameters on a prepared frame.
    #[staticmethod]
    #[pyo3(signature = (algorithm, frame, positive="ckd", seed=0, ensemble_size=None))]
    fn fit(algorithm: &str, frame: &PyFrame, positive: &str, seed: u64, ensemble_size: Option<usize>) -> PyResult<Self> {
        let mut params = ModelParams::paper(parse::<Algorithm>(algorithm)?);
        if let Some(n) = ensemble_size {
            params = params.with_ensemble_size(n);
        }
        let inner = models::train_frame(&ModelSpec { params, seed }, &frame.inner, positive).map_err(py_err)?;
        Ok(PyModel { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: models::TrainedModel::from_json(text).map_err(py_err)?,
        })
    }

    #[getter]
    fn algorithm(&self) -> &'static str {
        self.inner.algorithm().id()
    }

    #[getter]
    fn features(&self) -> Vec<String> {
        self.inner.features.clone()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    fn score(&self, frame: &PyFrame) -> PyResult<Vec<f64>> {
        self.inner.score_frame(&frame.inner).map_err(py_err)
    }

    fn predict(&self, frame: &PyFrame) -> PyResult<Vec<u8>> {
        self.inner.predict_frame(&frame.inner).map_err(py_err)
    }

    /// Accuracy, macro F1, macro AUC and confusion counts on `frame`.
    #[pyo3(signature = (frame, positive="ckd"))]
    fn evaluate(&self, frame: &PyFrame, positive: &str) -> PyResult<BTreeMap<String, f64>> {
        let m = evaluate::evaluate_test(&self.inner, &frame.inner, positive).map_err(py_err)?;
        Ok(metric_map(&m))
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("TrainedModel({}, features={})", self.inner.algorithm().id(), self.inner.features.len())
    }
}

fn metric_map(m: &MetricReport) -> BTreeMap<String, f64> {
    let c = &m.confusion;
    BTreeMap::from([
        ("accuracy".to_string(), m.accuracy),
        ("f1_macro".to_string(), m.f1_macro),
        ("auc_macro".to_string(), m.auc_macro),
        ("tp".to_string(), c.tp as f64),
        ("tn".to_string(), c.tn as f64),
        ("fp".to_string(), c.fp as f64),
        ("fn".to_string(), c.fn_ as f64),
    ])
}

/// Mann-Whitney AUC with ties credited one half.
#[pyfunction]
fn auc(y_true: Vec<u8>, scores: Vec<f64>) -> PyResult<f64> {
    evaluate::auc(&y_true, &scores).map_err(py_err)
}

/// Metrics from scores thresholded at `threshold`.
#[pyfunction]
#[pyo3(signature = (y_true, scores, threshold=0.5))]
fn metrics(y_true: Vec<u8>, scores: Vec<f64>, threshold: f64) -> PyResult<BTreeMap<String, f64>> {
    Ok(metric_map(&MetricReport::compute(&y_true, &scores, threshold).map_err(py_err)?))
}

#[pyclass(name = "ExperimentConfig", module = "leakless_py")]
struct PyConfig {
    inner: ExperimentConfig,
}

#[pymethods]
impl PyConfig {
    /// Defaults, overridden by the keys of an optional JSON object.
    #[new]
    #[pyo3(signature = (json=None))]
    fn new(json: Option<&str>) -> PyResult<Self> {
        let inner = match json {
            Some(text) => ExperimentConfig::from_json(text).map_err(py_err)?,
            None => ExperimentConfig::default(),
        };
        Ok(PyConfig { inner })
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    #[getter]
    fn dataset(&self) -> PathBuf {
        self.inner.dataset.clone()
    }

    #[setter]
    fn set_dataset(&mut self, path: PathBuf) {
        self.inner.dataset = path;
    }

    /// Copy with 100 trees / boosting stages everywhere.
    fn ci_profile(&self) -> PyConfig {
        PyConfig {
            inner: self.inner.clone().ci_profile(),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }
}

#[pyclass(name = "RunReport", module = "leakless_py")]
struct PyReport {
    inner: experiment::RunReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn feature_sets(&self) -> BTreeMap<String, Vec<String>> {
        self.inner
            .feature_sets
            .iter()
            .map(|(k, v)| (k.name().to_string(), v.clone()))
            .collect()
    }

    /// `{(feature_set, model): {metric: value}}` with the CV mean under
    /// `cv_mean`.
    fn cells(&self) -> BTreeMap<(String, String), BTreeMap<String, f64>> {
        self.inner
            .cells
            .iter()
            .map(|c| {
                let mut m = metric_map(&c.test);
                m.insert("cv_mean".into(), c.cv.mean);
                m.insert("cv_std".into(), c.cv.std);
                ((c.feature_set.name().to_string(), c.model.id().to_string()), m)
            })
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    fn deterministic_json(&self) -> PyResult<String> {
        self.inner.deterministic_json().map_err(py_err)
    }

    fn to_markdown(&self) -> String {
        self.inner.to_markdown()
    }

    /// Comparison against the published tables as markdown.
    #[pyo3(signature = (tables=None))]
    fn compare(&self, tables: Option<Vec<String>>) -> PyResult<String> {
        let tables = match tables {
            Some(t) => t.iter().map(|s| parse::<PaperTable>(s)).collect::<PyResult<Vec<_>>>()?,
            None => PaperTable::ALL.to_vec(),
        };
        Ok(experiment::compare(&self.inner, &tables).to_markdown())
    }
}

/// Runs the full workflow; releases the GIL while it works.
#[pyfunction]
fn run(py: Python<'_>, config: &PyConfig) -> PyResult<PyReport> {
    let cfg = config.inner.clone();
    let inner = py.detach(move || experiment::run(&cfg)).map_err(py_err)?;
    Ok(PyReport { inner })
}

#[pymodule]
fn leakless_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFrame>()?;
    m.add_class::<PyPipeline>()?;
    m.add_class::<PySelection>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(load_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(split, m)?)?;
    m.add_function(wrap_pyfunction!(lof_scores, m)?)?;
    m.add_function(wrap_pyfunction!(smote, m)?)?;
    m.add_function(wrap_pyfunction!(select_features, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
