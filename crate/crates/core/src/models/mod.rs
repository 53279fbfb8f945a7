//! The nine classifiers behind one train / score / predict contract.
//!
//! Every model returns a confidence for class 1: a probability for
//! probabilistic models (threshold 0.5) or a decision value for margin
//! models (threshold 0). `predict` is `score >= threshold`.

pub mod boost;
pub mod forest;
pub mod knn;
pub mod logistic;
pub mod naive_bayes;
pub mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Frame;
use crate::error::{Error, Result};
use crate::Matrix;
pub use tree::ClassCriterion;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SvmRbf,
    GaussianNb,
    Dtree,
    Rforest,
    Logistic,
    Knn,
    Gboost,
    Adaboost,
    XgbLike,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::SvmRbf,
        Algorithm::GaussianNb,
        Algorithm::Dtree,
        Algorithm::Rforest,
        Algorithm::Logistic,
        Algorithm::Knn,
        Algorithm::Gboost,
        Algorithm::Adaboost,
        Algorithm::XgbLike,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::SvmRbf => "svm_rbf",
            Algorithm::GaussianNb => "gaussian_nb",
            Algorithm::Dtree => "dtree",
            Algorithm::Rforest => "rforest",
            Algorithm::Logistic => "logistic",
            Algorithm::Knn => "knn",
            Algorithm::Gboost => "gboost",
            Algorithm::Adaboost => "adaboost",
            Algorithm::XgbLike => "xgb_like",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::SvmRbf => "Support Vector Machine",
            Algorithm::GaussianNb => "Gaussian Naive Bayes",
            Algorithm::Dtree => "Decision Tree",
            Algorithm::Rforest => "Random Forest",
            Algorithm::Logistic => "Logistic Regression",
            Algorithm::Knn => "K-Nearest Neighbors",
            Algorithm::Gboost => "Gradient Boosting",
            Algorithm::Adaboost => "AdaBoost",
            Algorithm::XgbLike => "XGBoost (xgb_like)",
        }
    }

    /// Margin models output a decision value thresholded at 0.
    pub fn is_margin(self) -> bool {
        matches!(self, Algorithm::SvmRbf | Algorithm::Adaboost)
    }

    pub fn threshold(self) -> f64 {
        if self.is_margin() {
            0.0
        } else {
            0.5
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::argument(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    Sqrt,
    All,
}

/// Hyperparameters per algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelParams {
    SvmRbf {
        c: f64,
        /// `None` derives gamma from the training matrix.
        gamma: Option<f64>,
        tol: f64,
        max_iter: usize,
    },
    GaussianNb {
        var_smoothing: f64,
    },
    Dtree {
        criterion: ClassCriterion,
        max_depth: Option<usize>,
    },
    Rforest {
        n_trees: usize,
        criterion: ClassCriterion,
        max_depth: Option<usize>,
        max_features: MaxFeatures,
    },
    Logistic {
        c: f64,
        max_iter: usize,
        tol: f64,
    },
    Knn {
        k: usize,
    },
    Gboost {
        n_stages: usize,
        learning_rate: f64,
        max_depth: usize,
    },
    Adaboost {
        n_rounds: usize,
        learning_rate: f64,
    },
    XgbLike {
        n_rounds: usize,
        eta: f64,
        max_depth: usize,
        lambda: f64,
        min_child_weight: f64,
        unit_hessian: bool,
    },
}

impl ModelParams {
    /// Published defaults.
    pub fn paper(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::SvmRbf => ModelParams::SvmRbf {
                c: 1.0,
                gamma: None,
                tol: 1e-3,
                max_iter: 10_000_000,
            },
            Algorithm::GaussianNb => ModelParams::GaussianNb { var_smoothing: 1e-9 },
            Algorithm::Dtree => ModelParams::Dtree {
                criterion: ClassCriterion::Gini,
                max_depth: None,
            },
            Algorithm::Rforest => ModelParams::Rforest {
                n_trees: 1000,
                criterion: ClassCriterion::Gini,
                max_depth: None,
                max_features: MaxFeatures::Sqrt,
            },
            Algorithm::Logistic => ModelParams::Logistic {
                c: 1.0,
                max_iter: 100,
                tol: 1e-6,
            },
            Algorithm::Knn => ModelParams::Knn { k: 25 },
            Algorithm::Gboost => ModelParams::Gboost {
                n_stages: 1000,
                learning_rate: 0.01,
                max_depth: 3,
            },
            Algorithm::Adaboost => ModelParams::Adaboost {
                n_rounds: 50,
                learning_rate: 1.0,
            },
            Algorithm::XgbLike => ModelParams::XgbLike {
                n_rounds: 1000,
                eta: 0.3,
                max_depth: 3,
                lambda: 1.0,
                min_child_weight: 1.0,
                unit_hessian: false,
            },
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            ModelParams::SvmRbf { .. } => Algorithm::SvmRbf,
            ModelParams::GaussianNb { .. } => Algorithm::GaussianNb,
            ModelParams::Dtree { .. } => Algorithm::Dtree,
            ModelParams::Rforest { .. } => Algorithm::Rforest,
            ModelParams::Logistic { .. } => Algorithm::Logistic,
            ModelParams::Knn { .. } => Algorithm::Knn,
            ModelParams::Gboost { .. } => Algorithm::Gboost,
            ModelParams::Adaboost { .. } => Algorithm::Adaboost,
            ModelParams::XgbLike { .. } => Algorithm::XgbLike,
        }
    }

    /// Caps ensemble sizes at `n` (a cheaper profile for quick runs).
    pub fn with_ensemble_size(mut self, n: usize) -> Self {
        match &mut self {
            ModelParams::Rforest { n_trees, .. } => *n_trees = n,
            ModelParams::Gboost { n_stages, .. } => *n_stages = n,
            ModelParams::XgbLike { n_rounds, .. } => *n_rounds = n,
            _ => {}
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub params: ModelParams,
    #[serde(default)]
    pub seed: u64,
}

impl ModelSpec {
    pub fn paper(algorithm: Algorithm, seed: u64) -> Self {
        ModelSpec {
            params: ModelParams::paper(algorithm),
            seed,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.params.algorithm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum Fitted {
    SvmRbf(svm::Svm),
    GaussianNb(naive_bayes::GaussianNb),
    Dtree(tree::Tree),
    Rforest(forest::Forest),
    Logistic(logistic::Logistic),
    Knn(knn::Knn),
    Gboost(boost::GradientBoosting),
    Adaboost(boost::AdaBoost),
    XgbLike(boost::SecondOrderBoosting),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub version: u32,
    pub spec: ModelSpec,
    pub features: Vec<String>,
    pub fitted: Fitted,
    /// Non-fatal issues such as solver non-convergence.
    pub warnings: Vec<String>,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|a| *a /= s);
    }
    v
}

/// `1 / (n_features * variance)`.
pub fn rbf_gamma(n_features: usize, variance: f64) -> Result<f64> {
    if n_features < 1 {
        return Err(Error::argument("gamma needs at least one feature"));
    }
    if !(variance > 0.0) {
        return Err(Error::argument(format!("gamma needs a positive variance, got {variance}")));
    }
    Ok(1.0 / (n_features as f64 * variance))
}

/// Population variance over every element of the matrix.
pub fn element_variance(x: &Matrix) -> f64 {
    let d = x.as_slice();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|&v| !(v >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::argument("probabilities must be non-negative and sum to 1"));
    }
    Ok(())
}

/// `1 - sum p^2`.
pub fn gini(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(1.0 - p.iter().map(|v| v * v).sum::<f64>())
}

/// `-sum p log2 p`, with `0 log 0 = 0`.
pub fn entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(p.iter().filter(|&&v| v > 0.0).map(|v| -v * v.log2()).sum())
}

/// Fits `spec` on `x` (rows) with binary targets `y`. `features` names the
/// columns of `x` and is checked again at prediction time.
pub fn train(spec: &ModelSpec, features: &[String], x: &Matrix, y: &[u8]) -> Result<TrainedModel> {
    if x.cols() != features.len() {
        return Err(Error::argument(format!(
            "{} feature names for a matrix with {} columns",
            features.len(),
            x.cols()
        )));
    }
    if x.rows() != y.len() {
        return Err(Error::argument("row count of X and y differ"));
    }
    if x.cols() == 0 {
        return Err(Error::argument("cannot train on zero features"));
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("training matrix has non-finite cells".into()));
    }
    if y.iter().any(|&t| t > 1) {
        return Err(Error::argument("targets must be 0 or 1"));
    }
    let positives = y.iter().filter(|&&t| t == 1).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::argument("training labels contain a single class"));
    }
    let mut warnings = Vec::new();
    let fitted = match &spec.params {
        ModelParams::SvmRbf { c, gamma, tol, max_iter } => {
            let gamma = match gamma {
                Some(g) => *g,
                None => rbf_gamma(x.cols(), element_variance(x))?,
            };
            let m = svm::fit(x, y, *c, gamma, *tol, *max_iter);
            if !m.converged {
                warnings.push(format!("SMO stopped after {} iterations without convergence", m.iterations));
            }
            Fitted::SvmRbf(m)
        }
        ModelParams::GaussianNb { var_smoothing } => Fitted::GaussianNb(naive_bayes::fit(x, y, *var_smoothing)),
        ModelParams::Dtree { criterion, max_depth } => {
            let (stats, samples) = tree::class_stats(y, &vec![1.0; y.len()]);
            let mut p = tree::GrowParams::new(tree::Criterion::Class(*criterion));
            p.max_depth = *max_depth;
            Fitted::Dtree(tree::grow(x, &stats, &samples, p, None, &tree::class_leaf))
        }
        ModelParams::Rforest {
            n_trees,
            criterion,
            max_depth,
            max_features,
        } => {
            if *n_trees == 0 {
                return Err(Error::argument("forest needs at least one tree"));
            }
            let m = x.cols();
            let max_features = match max_features {
                MaxFeatures::Sqrt => ((m as f64).sqrt() as usize).max(1),
                MaxFeatures::All => m,
            };
            let p = forest::ForestParams {
                n_trees: *n_trees,
                criterion: *criterion,
                max_depth: *max_depth,
                max_features,
            };
            Fitted::Rforest(forest::fit(x, y, &p, spec.seed))
        }
        ModelParams::Logistic { c, max_iter, tol } => {
            let m = logistic::fit(x, y, *c, *max_iter, *tol);
            if !m.converged {
                warnings.push(format!("L-BFGS did not converge within {} iterations", m.iterations));
            }
            Fitted::Logistic(m)
        }
        ModelParams::Knn { k } => {
            if *k < 1 || *k > x.rows() {
                return Err(Error::argument(format!("knn k = {k} needs 1 <= k <= {} rows", x.rows())));
            }
            Fitted::Knn(knn::Knn::new(x, y, *k))
        }
        ModelParams::Gboost {
            n_stages,
            learning_rate,
            max_depth,
        } => Fitted::Gboost(boost::fit_gboost(x, y, *n_stages, *learning_rate, *max_depth)),
        ModelParams::Adaboost { n_rounds, learning_rate } => {
            if *n_rounds == 0 {
                return Err(Error::argument("adaboost needs at least one round"));
            }
            Fitted::Adaboost(boost::fit_adaboost(x, y, *n_rounds, *learning_rate))
        }
        ModelParams::XgbLike {
            n_rounds,
            eta,
            max_depth,
            lambda,
            min_child_weight,
            unit_hessian,
        } => Fitted::XgbLike(boost::fit_xgb(
            x,
            y,
            &boost::SecondOrderParams {
                n_rounds: *n_rounds,
                eta: *eta,
                max_depth: *max_depth,
                lambda: *lambda,
                min_child_weight: *min_child_weight,
                unit_hessian: *unit_hessian,
            },
        )),
    };
    for w in &warnings {
        log::warn!("{}: {w}", spec.algorithm());
    }
    Ok(TrainedModel {
        version: MODEL_FORMAT_VERSION,
        spec: spec.clone(),
        features: features.to_vec(),
        fitted,
        warnings,
    })
}

/// Trains on an encoded, imputed frame with `positive` as class 1.
pub fn train_frame(spec: &ModelSpec, frame: &Frame, positive: &str) -> Result<TrainedModel> {
    train(spec, &frame.feature_names(), &frame.feature_matrix()?, &frame.targets(positive)?)
}

impl TrainedModel {
    pub fn algorithm(&self) -> Algorithm {
        self.spec.algorithm()
    }

    pub fn threshold(&self) -> f64 {
        self.algorithm().threshold()
    }

    fn check_features(&self, features: &[String], x: &Matrix) -> Result<()> {
        if features != self.features.as_slice() {
            let culprit = features
                .iter()
                .find(|f| !self.features.contains(f))
                .or_else(|| self.features.iter().find(|f| !features.contains(f)))
                .map_or("<column order>", String::as_str);
            return Err(Error::schema(culprit, "feature list differs from the one the model was trained on"));
        }
        if x.cols() != features.len() {
            return Err(Error::argument("matrix width differs from the feature list"));
        }
        Ok(())
    }

    /// Confidence for class 1 on one row, no feature check.
    pub fn score_row(&self, row: &[f64]) -> f64 {
        match &self.fitted {
            Fitted::SvmRbf(m) => m.decision_row(row),
            Fitted::GaussianNb(m) => m.posterior(row)[1],
            Fitted::Dtree(t) => t.predict_row(row),
            Fitted::Rforest(f) => f.score_row(row),
            Fitted::Logistic(m) => sigmoid(m.decision_row(row)),
            Fitted::Knn(m) => m.score_row(row),
            Fitted::Gboost(m) => sigmoid(m.decision_row(row)),
            Fitted::Adaboost(m) => m.decision_row(row),
            Fitted::XgbLike(m) => sigmoid(m.decision_row(row)),
        }
    }

    pub fn score(&self, features: &[String], x: &Matrix) -> Result<Vec<f64>> {
        self.check_features(features, x)?;
        Ok(x.iter_rows().map(|r| self.score_row(r)).collect())
    }

    pub fn predict(&self, features: &[String], x: &Matrix) -> Result<Vec<u8>> {
        let t = self.threshold();
        Ok(self.score(features, x)?.into_iter().map(|s| u8::from(s >= t)).collect())
    }

    pub fn score_frame(&self, frame: &Frame) -> Result<Vec<f64>> {
        self.score(&frame.feature_names(), &frame.feature_matrix()?)
    }

    pub fn predict_frame(&self, frame: &Frame) -> Result<Vec<u8>> {
        self.predict(&frame.feature_names(), &frame.feature_matrix()?)
    }

    /// Normalised impurity importances for tree models, absolute
    /// coefficients for logistic regression; `None` otherwise.
    pub fn importances(&self) -> Option<Vec<f64>> {
        match &self.fitted {
            Fitted::Dtree(t) => Some(normalized(t.importances.clone())),
            Fitted::Rforest(f) => Some(f.importances()),
            Fitted::Gboost(m) => Some(m.importances()),
            Fitted::XgbLike(m) => Some(m.importances()),
            Fitted::Adaboost(m) => Some(m.importances()),
            Fitted::Logistic(m) => Some(m.coef.iter().map(|c| c.abs()).collect()),
            Fitted::SvmRbf(_) | Fitted::GaussianNb(_) | Fitted::Knn(_) => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<TrainedModel> {
        let m: TrainedModel = serde_json::from_str(text)?;
        if m.version != MODEL_FORMAT_VERSION {
            return Err(Error::State(format!("unsupported model format version {}", m.version)));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(m: usize) -> Vec<String> {
        (0..m).map(|j| format!("f{j}")).collect()
    }

    fn blobs() -> (Matrix, Vec<u8>) {
        let rows: Vec<[f64; 2]> = (0..40)
            .map(|i| {
                let off = if i < 20 { -1.5 } else { 1.5 };
                [off + ((i * 7) % 5) as f64 * 0.1, off + ((i * 3) % 4) as f64 * 0.1]
            })
            .collect();
        let y = (0..40).map(|i| u8::from(i >= 20)).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn gamma_and_impurities() {
        assert!((rbf_gamma(13, 1.0).unwrap() - 1.0 / 13.0).abs() < 1e-15);
        assert!((rbf_gamma(5, 2.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(rbf_gamma(5, 0.0).is_err());
        assert_eq!(gini(&[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(gini(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(gini(&[0.75, 0.25]).unwrap(), 0.375);
        assert!(gini(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn every_algorithm_fits_separable_blobs() {
        let (x, y) = blobs();
        for alg in Algorithm::ALL {
            let params = ModelParams::paper(alg).with_ensemble_size(25);
            let params = match params {
                ModelParams::Knn { .. } => ModelParams::Knn { k: 5 },
                p => p,
            };
            let m = train(&ModelSpec { params, seed: 1 }, &names(2), &x, &y).unwrap();
            let pred = m.predict(&names(2), &x).unwrap();
            assert_eq!(pred, y, "{alg}");
            let back = TrainedModel::from_json(&m.to_json().unwrap()).unwrap();
            assert_eq!(back.score(&names(2), &x).unwrap(), m.score(&names(2), &x).unwrap(), "{alg}");
        }
    }

    #[test]
    fn feature_mismatch_is_a_schema_error() {
        let (x, y) = blobs();
        let m = train(&ModelSpec::paper(Algorithm::GaussianNb, 0), &names(2), &x, &y).unwrap();
        let other = vec!["f1".to_string(), "f0".to_string()];
        assert!(matches!(m.predict(&other, &x), Err(Error::Schema { .. })));
    }

    #[test]
    fn single_class_and_oversized_k_are_rejected() {
        let (x, _) = blobs();
        let spec = ModelSpec::paper(Algorithm::Dtree, 0);
        assert!(matches!(train(&spec, &names(2), &x, &[1; 40]), Err(Error::Argument(_))));
        let small = x.select_rows(&[0, 1, 38, 39]);
        let knn = ModelSpec::paper(Algorithm::Knn, 0);
        assert!(matches!(train(&knn, &names(2), &small, &[0, 0, 1, 1]), Err(Error::Argument(_))));
    }

    #[test]
    fn knn_vote_fraction() {
        let rows: Vec<[f64; 1]> = (0..25).map(|i| [i as f64]).collect();
        let y: Vec<u8> = (0..25).map(|i| u8::from(i < 13)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let m = train(&ModelSpec::paper(Algorithm::Knn, 0), &names(1), &x, &y).unwrap();
        let s = m.score(&names(1), &Matrix::from_rows(&[[3.0]]).unwrap()).unwrap();
        assert_eq!(s, vec![13.0 / 25.0]);
        assert_eq!(m.predict(&names(1), &Matrix::from_rows(&[[3.0]]).unwrap()).unwrap(), vec![1]);
    }
}
