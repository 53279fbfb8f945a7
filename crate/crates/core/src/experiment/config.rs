use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{DataFormat, RepairTable};
use crate::error::{Error, Result};
use crate::evaluate::CvMode;
use crate::feature_select::SelectionConfig;
use crate::models::{Algorithm, ModelParams, ModelSpec};
use crate::resample::LofRule;

/// Environment variable that overrides the configured dataset path.
pub const DATASET_ENV: &str = "LEAKLESS_DATASET";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub k_impute: usize,
    pub k_lof: usize,
    pub lof_rule: LofRule,
    pub k_smote: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k_impute: 5,
            k_lof: 20,
            lof_rule: LofRule::default(),
            k_smote: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub mode: CvMode,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            repeats: 10,
            mode: CvMode::PaperFaithful,
        }
    }
}

/// Whether outlier removal and oversampling run once on all features or
/// again for every selected subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMode {
    SinglePass,
    PerFeatureSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSetId {
    F1,
    F2,
    F3,
}

impl FeatureSetId {
    pub const ALL: [FeatureSetId; 3] = [FeatureSetId::F1, FeatureSetId::F2, FeatureSetId::F3];

    pub fn name(self) -> &'static str {
        match self {
            FeatureSetId::F1 => "F1",
            FeatureSetId::F2 => "F2",
            FeatureSetId::F3 => "F3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSetChoice {
    F1,
    F2,
    F3,
    All,
}

impl FeatureSetChoice {
    pub fn sets(self) -> Vec<FeatureSetId> {
        match self {
            FeatureSetChoice::F1 => vec![FeatureSetId::F1],
            FeatureSetChoice::F2 => vec![FeatureSetId::F2],
            FeatureSetChoice::F3 => vec![FeatureSetId::F3],
            FeatureSetChoice::All => FeatureSetId::ALL.to_vec(),
        }
    }
}

impl std::str::FromStr for FeatureSetChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(FeatureSetChoice::F1),
            "f2" => Ok(FeatureSetChoice::F2),
            "f3" => Ok(FeatureSetChoice::F3),
            "all" => Ok(FeatureSetChoice::All),
            other => Err(Error::Config(format!("unknown feature set `{other}` (f1, f2, f3, all)"))),
        }
    }
}

/// Declarative description of a full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    /// Guessed from the file extension when absent.
    pub format: Option<DataFormat>,
    pub split_ratio: f64,
    pub stratify_split: bool,
    pub seed: u64,
    pub positive_class: String,
    pub repair: RepairTable,
    pub pipeline: PipelineConfig,
    pub selection: SelectionConfig,
    pub cv: CvConfig,
    pub resample_mode: ResampleMode,
    pub feature_sets: FeatureSetChoice,
    pub models: Vec<Algorithm>,
    /// Caps forest / boosting sizes of the evaluated models.
    pub model_ensemble_size: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: PathBuf::from("data/chronic_kidney_disease_full.arff"),
            format: None,
            split_ratio: 0.75,
            stratify_split: false,
            seed: 42,
            positive_class: "ckd".into(),
            repair: RepairTable::default(),
            pipeline: PipelineConfig::default(),
            selection: SelectionConfig::default(),
            cv: CvConfig::default(),
            resample_mode: ResampleMode::SinglePass,
            feature_sets: FeatureSetChoice::All,
            models: Algorithm::ALL.to_vec(),
            model_ensemble_size: None,
        }
    }
}

impl ExperimentConfig {
    /// 100 trees / stages everywhere instead of 1000.
    pub fn ci_profile(mut self) -> Self {
        self.selection.ensemble_size = 100;
        self.model_ensemble_size = Some(100);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Applies the dataset-path environment override, if set.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(p) = std::env::var_os(DATASET_ENV).filter(|p| !p.is_empty()) {
            self.dataset = PathBuf::from(p);
        }
        self
    }

    pub fn data_format(&self) -> DataFormat {
        self.format.unwrap_or_else(|| DataFormat::from_path(&self.dataset))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return fail(format!("split_ratio must lie in (0, 1), got {}", self.split_ratio));
        }
        let p = &self.pipeline;
        if p.k_impute < 1 || p.k_lof < 1 || p.k_smote < 1 {
            return fail("k_impute, k_lof and k_smote must be at least 1".into());
        }
        match p.lof_rule {
            LofRule::Auto { threshold } if !(threshold > 0.0) => {
                return fail("LOF threshold must be positive".into())
            }
            LofRule::Contamination { fraction } if !(0.0..0.5).contains(&fraction) => {
                return fail("LOF contamination must lie in [0, 0.5)".into())
            }
            _ => {}
        }
        let s = &self.selection;
        if !(s.top_fraction > 0.0 && s.top_fraction <= 1.0) {
            return fail(format!("top_fraction must lie in (0, 1], got {}", s.top_fraction));
        }
        if !(s.corr_threshold > 0.0 && s.corr_threshold <= 1.0) {
            return fail(format!("corr_threshold must lie in (0, 1], got {}", s.corr_threshold));
        }
        if s.mi_neighbors < 1 || s.rfecv_folds < 2 || s.importance_repeats < 1 || s.ensemble_size < 1 {
            return fail("selection counts must be positive (rfecv_folds >= 2)".into());
        }
        if self.cv.folds < 2 || self.cv.repeats < 1 {
            return fail("cv needs folds >= 2 and repeats >= 1".into());
        }
        if self.models.is_empty() {
            return fail("model list is empty".into());
        }
        if self.model_ensemble_size == Some(0) {
            return fail("model_ensemble_size must be positive".into());
        }
        if self.positive_class.is_empty() {
            return fail("positive_class is empty".into());
        }
        Ok(())
    }

    pub fn model_spec(&self, algorithm: Algorithm, seed: u64) -> ModelSpec {
        let mut params = ModelParams::paper(algorithm);
        if let Some(n) = self.model_ensemble_size {
            params = params.with_ensemble_size(n);
        }
        ModelSpec { params, seed }
    }
}
