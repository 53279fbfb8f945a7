use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, FeatureSetId, ResampleMode};
use super::paper;
use crate::dataset::{count_missing, find_duplicates, ingest, split, split_stratified, Frame, SplitPair};
use crate::error::{Error, Result};
use crate::evaluate::{accuracy, confusion, evaluate_test, fit_seed, repeat_folds, repeated_cv, CvResult, MetricReport};
use crate::feature_select::{pearson_matrix, select_features, CorrelatedPair, SelectionReport};
use crate::models::{train, Algorithm, TrainedModel, MODEL_FORMAT_VERSION};
use crate::resample::{detect_outliers, smote_detailed, LofConfig, SmoteConfig};
use crate::seed;
use crate::transforms::{
    pipeline_apply, pipeline_fit, preparation_stages, standard_apply, standard_fit, FittedPipeline, FittedStage,
    Provenance, StageSpec, PIPELINE_FORMAT_VERSION,
};
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub path: String,
    pub rows: usize,
    pub features: usize,
    pub classes: BTreeMap<String, usize>,
    pub missing_cells: usize,
    pub duplicate_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub seed: u64,
    pub ratio: f64,
    pub stratified: bool,
    pub train_rows: usize,
    pub test_rows: usize,
    pub train_classes: BTreeMap<String, usize>,
    pub test_classes: BTreeMap<String, usize>,
}

/// Class counts through outlier removal and oversampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResampleRecord {
    /// `all` for the single pass, otherwise the feature-set name.
    pub scope: String,
    pub features: usize,
    pub training: BTreeMap<String, usize>,
    pub after_lof: BTreeMap<String, usize>,
    pub lof_removed: usize,
    pub after_smote: BTreeMap<String, usize>,
    pub smote_synthetic: usize,
    pub smote_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub feature_set: FeatureSetId,
    pub model: Algorithm,
    pub features: usize,
    pub cv: CvResult,
    pub test: MetricReport,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub tool: String,
    pub pipeline_format: u32,
    pub model_format: u32,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            tool: concat!("leakless ", env!("CARGO_PKG_VERSION")).into(),
            pipeline_format: PIPELINE_FORMAT_VERSION,
            model_format: MODEL_FORMAT_VERSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub versions: Versions,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub split: SplitSummary,
    pub cv_mode: String,
    pub resampling: Vec<ResampleRecord>,
    pub selection: SelectionReport,
    /// Pearson r of the attribute pairs the reference correlation table lists.
    pub reference_correlations: Vec<CorrelatedPair>,
    pub feature_sets: BTreeMap<FeatureSetId, Vec<String>>,
    pub cells: Vec<CellReport>,
    /// Every choice the workflow makes that the method description leaves open.
    pub assumptions: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<RunReport> {
        Ok(serde_json::from_str(text)?)
    }

    /// JSON with the wall-clock field removed: identical for identical
    /// configs.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(map) = v.as_object_mut() {
            map.remove("wall_clock_seconds");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn cell(&self, set: FeatureSetId, model: Algorithm) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.feature_set == set && c.model == model)
    }
}

/// Cleaned dataset and its train/test partition.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub frame: Frame,
    pub dataset: DatasetSummary,
    pub split: SplitPair,
    pub split_summary: SplitSummary,
}

/// Training partition after encode / min-max / impute, LOF and SMOTE.
#[derive(Debug, Clone)]
pub struct Resampled {
    /// Preparation stages fitted on the raw training rows.
    pub pipeline: FittedPipeline,
    pub frame: Frame,
    pub record: ResampleRecord,
    pub removed: Vec<usize>,
    pub warnings: Vec<String>,
}

/// One feature set, ready for training and evaluation.
#[derive(Debug, Clone)]
pub struct PreparedSet {
    pub id: FeatureSetId,
    pub features: Vec<String>,
    /// Resampled, projected and standardized training rows.
    pub train: Frame,
    /// Test rows passed through `pipeline`.
    pub test: Frame,
    /// Train-fitted stages that map raw rows into model space.
    pub pipeline: FittedPipeline,
    pub resampling: ResampleRecord,
}

fn set_index(id: FeatureSetId) -> u64 {
    match id {
        FeatureSetId::F1 => 1,
        FeatureSetId::F2 => 2,
        FeatureSetId::F3 => 3,
    }
}

fn algorithm_index(alg: Algorithm) -> u64 {
    Algorithm::ALL.iter().position(|&a| a == alg).unwrap_or(0) as u64
}

pub fn split_seed(cfg: &ExperimentConfig) -> u64 {
    seed::derive(cfg.seed, "split", 0)
}

pub fn selection_seed(cfg: &ExperimentConfig) -> u64 {
    seed::derive(cfg.seed, "selection", 0)
}

fn smote_seed(cfg: &ExperimentConfig, scope: Option<FeatureSetId>) -> u64 {
    seed::derive(cfg.seed, "smote", scope.map_or(0, set_index))
}

pub fn cv_seed(cfg: &ExperimentConfig, set: FeatureSetId) -> u64 {
    seed::derive(cfg.seed, "cv", set_index(set))
}

pub fn model_seed(cfg: &ExperimentConfig, set: FeatureSetId, alg: Algorithm) -> u64 {
    seed::derive(seed::derive(cfg.seed, "model", set_index(set)), "algorithm", algorithm_index(alg))
}

/// Ingests, cleans and splits the configured dataset.
pub fn load(cfg: &ExperimentConfig) -> Result<Loaded> {
    cfg.validate()?;
    let frame = ingest(&cfg.dataset, cfg.data_format(), &cfg.repair)?;
    if !frame.classes().iter().any(|c| c == &cfg.positive_class) {
        return Err(Error::Config(format!(
            "positive class `{}` not among {:?}",
            cfg.positive_class,
            frame.classes()
        )));
    }
    let dataset = DatasetSummary {
        path: cfg.dataset.display().to_string(),
        rows: frame.n_rows(),
        features: frame.feature_names().len(),
        classes: frame.class_counts(),
        missing_cells: count_missing(&frame),
        duplicate_pairs: find_duplicates(&frame).len(),
    };
    let s = split_seed(cfg);
    let pair = if cfg.stratify_split {
        split_stratified(&frame, cfg.split_ratio, s)?
    } else {
        split(&frame, cfg.split_ratio, s)?
    };
    let split_summary = SplitSummary {
        seed: s,
        ratio: cfg.split_ratio,
        stratified: cfg.stratify_split,
        train_rows: pair.train.n_rows(),
        test_rows: pair.test.n_rows(),
        train_classes: pair.train.class_counts(),
        test_classes: pair.test.class_counts(),
    };
    Ok(Loaded {
        frame,
        dataset,
        split: pair,
        split_summary,
    })
}

/// Fits the preparation stages on `raw_train` (optionally projected to
/// `features` first), then removes outliers and oversamples.
pub fn resample_train(
    cfg: &ExperimentConfig,
    raw_train: &Frame,
    features: Option<&[String]>,
    smote_seed: u64,
    scope: &str,
) -> Result<Resampled> {
    let mut stages = Vec::new();
    if let Some(f) = features {
        stages.push(StageSpec::Project { features: f.to_vec() });
    }
    stages.extend(preparation_stages(cfg.pipeline.k_impute));
    let pipeline = pipeline_fit(raw_train, &stages)?;
    let prepared = pipeline_apply(raw_train, &pipeline)?;
    let lof = detect_outliers(
        &prepared,
        &LofConfig {
            k: cfg.pipeline.k_lof,
            rule: cfg.pipeline.lof_rule,
        },
    )?;
    let sm = smote_detailed(
        &lof.frame,
        &SmoteConfig {
            k: cfg.pipeline.k_smote,
            target: None,
            seed: smote_seed,
        },
    )?;
    let mut warnings = Vec::new();
    if sm.k_used < cfg.pipeline.k_smote {
        warnings.push(format!(
            "{scope}: SMOTE neighbour count reduced from {} to {}",
            cfg.pipeline.k_smote, sm.k_used
        ));
    }
    let record = ResampleRecord {
        scope: scope.to_string(),
        features: prepared.feature_names().len(),
        training: prepared.class_counts(),
        after_lof: lof.frame.class_counts(),
        lof_removed: lof.removed.len(),
        after_smote: sm.frame.class_counts(),
        smote_synthetic: sm.synthetic,
        smote_k: sm.k_used,
    };
    Ok(Resampled {
        pipeline,
        frame: sm.frame,
        record,
        removed: lof.removed,
        warnings,
    })
}

/// Projects the resampled rows to `features`, fits the standardizer on them
/// and extends the preparation pipeline so raw rows follow the same path.
pub fn finish_set(res: &Resampled, features: &[String]) -> Result<(Frame, FittedPipeline)> {
    let projected = res.frame.project(features)?;
    let params = standard_fit(&projected)?;
    let train_frame = standard_apply(&projected, &params)?;
    let mut pipeline = res.pipeline.project(features)?;
    pipeline.push(FittedStage::Standardize(params), Provenance::Train, res.frame.n_rows())?;
    Ok((train_frame, pipeline))
}

/// Single-pass preparation of the whole training partition.
pub fn prepare(cfg: &ExperimentConfig, loaded: &Loaded) -> Result<Resampled> {
    resample_train(cfg, &loaded.split.train, None, smote_seed(cfg, None), "all")
}

pub fn select(cfg: &ExperimentConfig, resampled: &Resampled) -> Result<SelectionReport> {
    select_features(&resampled.frame, &cfg.positive_class, &cfg.selection, selection_seed(cfg))
}

pub fn set_features(selection: &SelectionReport, id: FeatureSetId) -> Vec<String> {
    let set = match id {
        FeatureSetId::F1 => &selection.sets.f1,
        FeatureSetId::F2 => &selection.sets.f2,
        FeatureSetId::F3 => &selection.sets.f3,
    };
    // keep the dataset's column order
    selection.features.iter().filter(|f| set.contains(*f)).cloned().collect()
}

/// Builds the configured feature sets. Empty sets are skipped.
pub fn build_sets(
    cfg: &ExperimentConfig,
    loaded: &Loaded,
    resampled: &Resampled,
    selection: &SelectionReport,
) -> Result<Vec<PreparedSet>> {
    let mut out = Vec::new();
    for id in cfg.feature_sets.sets() {
        let features = set_features(selection, id);
        if features.is_empty() {
            continue;
        }
        let per_set;
        let source = match cfg.resample_mode {
            ResampleMode::SinglePass => resampled,
            ResampleMode::PerFeatureSet => {
                per_set = resample_train(cfg, &loaded.split.train, Some(&features), smote_seed(cfg, Some(id)), id.name())?;
                &per_set
            }
        };
        let (train_frame, pipeline) = finish_set(source, &features)?;
        let test = pipeline_apply(&loaded.split.test, &pipeline)?;
        out.push(PreparedSet {
            id,
            features,
            train: train_frame,
            test,
            pipeline,
            resampling: source.record.clone(),
        });
    }
    Ok(out)
}

pub fn train_set(cfg: &ExperimentConfig, set: &PreparedSet) -> Result<Vec<TrainedModel>> {
    let x = set.train.feature_matrix()?;
    let y = set.train.targets(&cfg.positive_class)?;
    cfg.models
        .par_iter()
        .map(|&alg| train(&cfg.model_spec(alg, model_seed(cfg, set.id, alg)), &set.features, &x, &y))
        .collect()
}

struct FoldData {
    x_train: Matrix,
    y_train: Vec<u8>,
    x_valid: Matrix,
    y_valid: Vec<u8>,
    seed: u64,
}

/// Repeated stratified CV for every configured model on one feature set.
///
/// Paper-faithful mode folds the already prepared (oversampled,
/// standardized) training rows. Strict mode folds the raw training
/// partition and refits preparation, outlier removal, oversampling and
/// standardization inside every training fold.
pub fn validate_set(cfg: &ExperimentConfig, loaded: &Loaded, set: &PreparedSet) -> Result<Vec<CvResult>> {
    let s = cv_seed(cfg, set.id);
    let (folds, repeats) = (cfg.cv.folds, cfg.cv.repeats);
    match cfg.cv.mode {
        crate::evaluate::CvMode::PaperFaithful => {
            let x = set.train.feature_matrix()?;
            let y = set.train.targets(&cfg.positive_class)?;
            cfg.models
                .iter()
                .map(|&alg| repeated_cv(&cfg.model_spec(alg, 0), &set.features, &x, &y, folds, repeats, s))
                .collect()
        }
        crate::evaluate::CvMode::Strict => {
            let raw = &loaded.split.train;
            let pos = &cfg.positive_class;
            let y = raw.targets(pos)?;
            let mut jobs = Vec::with_capacity(folds * repeats);
            for r in 0..repeats {
                let assignment = repeat_folds(&y, folds, s, r)?;
                for (f, held_out) in assignment.into_iter().enumerate() {
                    let kept: Vec<usize> = (0..y.len()).filter(|i| held_out.binary_search(i).is_err()).collect();
                    jobs.push((kept, held_out, fit_seed(s, r, f)));
                }
            }
            let scope = match cfg.resample_mode {
                ResampleMode::SinglePass => None,
                ResampleMode::PerFeatureSet => Some(set.features.as_slice()),
            };
            let data = jobs
                .par_iter()
                .map(|(kept, held_out, fold_seed)| {
                    let res = resample_train(cfg, &raw.select_rows(kept), scope, seed::derive(*fold_seed, "smote", 0), "fold")?;
                    let (train_frame, pipeline) = finish_set(&res, &set.features)?;
                    let valid = pipeline_apply(&raw.select_rows(held_out), &pipeline)?;
                    Ok(FoldData {
                        x_train: train_frame.feature_matrix()?,
                        y_train: train_frame.targets(pos)?,
                        x_valid: valid.feature_matrix()?,
                        y_valid: valid.targets(pos)?,
                        seed: *fold_seed,
                    })
                })
                .collect::<Result<Vec<FoldData>>>()?;
            cfg.models
                .iter()
                .map(|&alg| {
                    let accuracies = data
                        .par_iter()
                        .map(|d| {
                            let model = train(&cfg.model_spec(alg, d.seed), &set.features, &d.x_train, &d.y_train)?;
                            let pred = model.predict(&set.features, &d.x_valid)?;
                            Ok(accuracy(&confusion(&d.y_valid, &pred)?))
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    Ok(CvResult::from_accuracies(folds, repeats, s, accuracies))
                })
                .collect()
        }
    }
}

/// Pearson r between the named columns of a prepared frame, for the pairs
/// listed in the reference correlation table.
pub fn reference_correlations(frame: &Frame) -> Result<Vec<CorrelatedPair>> {
    let x = frame.feature_matrix()?;
    let names = frame.feature_names();
    let corr = pearson_matrix(&x);
    let mut out = Vec::new();
    for cell in paper::TABLE_III {
        let (Some(a), Some(b)) = (
            names.iter().position(|n| n == cell.a),
            names.iter().position(|n| n == cell.b),
        ) else {
            continue;
        };
        out.push(CorrelatedPair {
            a: cell.a.to_string(),
            b: cell.b.to_string(),
            r: corr.get(a, b),
        });
    }
    Ok(out)
}

pub fn assumptions(cfg: &ExperimentConfig) -> BTreeMap<String, String> {
    let entries = [
        ("split", if cfg.stratify_split { "stratified shuffle" } else { "unstratified shuffle" }.to_string()),
        ("encoding", "two-category columns become one 0/1 indicator, categories in sorted order".into()),
        ("imputation", "unweighted mean over k nearest training donors, NaN-aware Euclidean distance".into()),
        ("lof_neighbourhood", "exactly k neighbours, ties broken by row index".into()),
        ("lof_rule", serde_json::to_string(&cfg.pipeline.lof_rule).unwrap_or_default()),
        ("smote_target", "minority grown to the majority count".into()),
        (
            "resample_mode",
            match cfg.resample_mode {
                ResampleMode::SinglePass => "outlier removal and oversampling run once on all features",
                ResampleMode::PerFeatureSet => "preparation, outlier removal and oversampling rerun per feature set",
            }
            .into(),
        ),
        ("selection_data", "scorers and correlations use the oversampled training rows".into()),
        ("mi_noise", "continuous columns get 1e-10 jitter seeded by row content".into()),
        ("rfecv_ties", "smallest feature count among equal mean accuracies".into()),
        ("importance_threshold", "mean importance, averaged over repeated fits".into()),
        ("correlation_pruning", "the member of a correlated pair with the lower chi-square score is dropped".into()),
        ("svm_gamma", "1 / (n_features * variance of the training matrix)".into()),
        ("xgb_like", "second-order boosting, eta 0.3, depth 3, lambda 1, min_child_weight 1".into()),
        ("adaboost", "SAMME.R with depth-1 trees".into()),
        ("forest_score", "mean leaf class probability across trees".into()),
        ("cv_mode", cfg.cv.mode.label().into()),
        ("strict_cv_selection", "strict mode reuses the feature sets selected on the full training partition".into()),
        ("auc", "Mann-Whitney pair count, ties credited one half, macro average over both classes".into()),
    ];
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Runs the whole workflow: ingest, split, prepare, resample, select, then
/// per feature set standardize, cross-validate, train and evaluate.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let started = Instant::now();
    let loaded = load(cfg)?;
    let resampled = prepare(cfg, &loaded)?;
    let selection = select(cfg, &resampled)?;
    let reference = reference_correlations(&resampled.frame)?;
    let sets = build_sets(cfg, &loaded, &resampled, &selection)?;

    let mut warnings = resampled.warnings.clone();
    let mut resampling = vec![resampled.record.clone()];
    let mut feature_sets = BTreeMap::new();
    for id in cfg.feature_sets.sets() {
        let features = set_features(&selection, id);
        if features.is_empty() {
            warnings.push(format!("feature set {} is empty; no models trained on it", id.name()));
        }
        feature_sets.insert(id, features);
    }

    let mut cells = Vec::new();
    for set in &sets {
        if cfg.resample_mode == ResampleMode::PerFeatureSet {
            resampling.push(set.resampling.clone());
        }
        let cv = validate_set(cfg, &loaded, set)?;
        let models = train_set(cfg, set)?;
        for (model, cv) in models.into_iter().zip(cv) {
            let test = evaluate_test(&model, &set.test, &cfg.positive_class)?;
            cells.push(CellReport {
                feature_set: set.id,
                model: model.algorithm(),
                features: set.features.len(),
                cv,
                test,
                warnings: model.warnings.clone(),
            });
        }
    }

    Ok(RunReport {
        versions: Versions::default(),
        config: cfg.clone(),
        dataset: loaded.dataset,
        split: loaded.split_summary,
        cv_mode: cfg.cv.mode.label().into(),
        resampling,
        selection,
        reference_correlations: reference,
        feature_sets,
        cells,
        assumptions: assumptions(cfg),
        warnings,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}
