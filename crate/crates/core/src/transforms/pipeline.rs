//! Ordered fit-on-train / apply-anywhere composition of the stages.

use serde::{Deserialize, Serialize};

use super::encode::{onehot_apply, onehot_fit, EncoderMap};
use super::impute::{knn_impute_apply, knn_impute_fit, ImputerModel};
use super::minmax::{minmax_apply, minmax_fit, MinMaxParams};
use super::standard::{standard_apply, standard_fit, StandardParams};
use crate::dataset::Frame;
use crate::error::{Error, Result};

pub const PIPELINE_FORMAT_VERSION: u32 = 1;

/// An unfitted stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum StageSpec {
    Project { features: Vec<String> },
    Encode,
    MinMax,
    Impute { k: usize },
    Standardize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", content = "params", rename_all = "snake_case")]
pub enum FittedStage {
    Project { features: Vec<String> },
    Encode(EncoderMap),
    MinMax(MinMaxParams),
    Impute(ImputerModel),
    Standardize(StandardParams),
}

/// Partition a stage's parameters were learned from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    #[serde(flatten)]
    pub stage: FittedStage,
    pub provenance: Provenance,
    /// Rows of the partition the stage was fitted on.
    pub fitted_rows: usize,
}

trait Ranked {
    fn rank(&self) -> u8;
    fn name(&self) -> &'static str;
}

impl Ranked for StageSpec {
    fn rank(&self) -> u8 {
        match self {
            StageSpec::Project { .. } => 0,
            StageSpec::Encode => 1,
            StageSpec::MinMax => 2,
            StageSpec::Impute { .. } => 3,
            StageSpec::Standardize => 4,
        }
    }
    fn name(&self) -> &'static str {
        ["project", "encode", "min_max", "impute", "standardize"][self.rank() as usize]
    }
}

impl Ranked for FittedStage {
    fn rank(&self) -> u8 {
        match self {
            FittedStage::Project { .. } => 0,
            FittedStage::Encode(_) => 1,
            FittedStage::MinMax(_) => 2,
            FittedStage::Impute(_) => 3,
            FittedStage::Standardize(_) => 4,
        }
    }
    fn name(&self) -> &'static str {
        ["project", "encode", "min_max", "impute", "standardize"][self.rank() as usize]
    }
}

fn check_order<T: Ranked>(stages: &[T]) -> Result<()> {
    for w in stages.windows(2) {
        if w[0].rank() >= w[1].rank() {
            return Err(Error::State(format!(
                "stage `{}` may not follow `{}`; order is project, encode, min_max, impute, standardize",
                w[1].name(),
                w[0].name()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    pub version: u32,
    pub stages: Vec<StageRecord>,
}

impl FittedPipeline {
    pub fn stage_names(&self) -> Vec<&'static str> {
        self.stages.iter().map(|s| s.stage.name()).collect()
    }

    pub fn imputer(&self) -> Option<&ImputerModel> {
        self.stages.iter().find_map(|s| match &s.stage {
            FittedStage::Impute(m) => Some(m),
            _ => None,
        })
    }

    /// Same parameters restricted to `features`, preceded by a projection so
    /// excluded columns never reach the encoder.
    pub fn project(&self, features: &[String]) -> Result<FittedPipeline> {
        let mut stages = vec![StageRecord {
            stage: FittedStage::Project {
                features: features.to_vec(),
            },
            provenance: Provenance::Train,
            fitted_rows: self.stages.first().map_or(0, |s| s.fitted_rows),
        }];
        for rec in &self.stages {
            let stage = match &rec.stage {
                FittedStage::Project { features: kept } => {
                    if let Some(f) = features.iter().find(|f| !kept.contains(f)) {
                        return Err(Error::schema(f, "feature removed by an earlier projection"));
                    }
                    continue;
                }
                FittedStage::Encode(m) => FittedStage::Encode(m.restrict(features)),
                FittedStage::MinMax(p) => FittedStage::MinMax(p.restrict(features)),
                FittedStage::Impute(m) => FittedStage::Impute(m.restrict(features)?),
                FittedStage::Standardize(p) => FittedStage::Standardize(p.restrict(features)),
            };
            stages.push(StageRecord {
                stage,
                provenance: rec.provenance,
                fitted_rows: rec.fitted_rows,
            });
        }
        Ok(FittedPipeline {
            version: PIPELINE_FORMAT_VERSION,
            stages,
        })
    }

    /// Appends a stage fitted elsewhere (e.g. standardization after
    /// resampling). Order is enforced.
    pub fn push(&mut self, stage: FittedStage, provenance: Provenance, fitted_rows: usize) -> Result<()> {
        self.stages.push(StageRecord {
            stage,
            provenance,
            fitted_rows,
        });
        let stages: Vec<&FittedStage> = self.stages.iter().map(|s| &s.stage).collect();
        if let Err(e) = check_order_refs(&stages) {
            self.stages.pop();
            return Err(e);
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<FittedPipeline> {
        let p: FittedPipeline = serde_json::from_str(text)?;
        if p.version != PIPELINE_FORMAT_VERSION {
            return Err(Error::State(format!(
                "pipeline format version {} is not supported (expected {PIPELINE_FORMAT_VERSION})",
                p.version
            )));
        }
        Ok(p)
    }
}

fn check_order_refs(stages: &[&FittedStage]) -> Result<()> {
    for w in stages.windows(2) {
        if w[0].rank() >= w[1].rank() {
            return Err(Error::State(format!(
                "stage `{}` may not follow `{}`",
                w[1].name(),
                w[0].name()
            )));
        }
    }
    Ok(())
}

fn fit_stage(spec: &StageSpec, train: &Frame) -> Result<FittedStage> {
    Ok(match spec {
        StageSpec::Project { features } => {
            train.project(features)?;
            FittedStage::Project {
                features: features.clone(),
            }
        }
        StageSpec::Encode => FittedStage::Encode(onehot_fit(train)?),
        StageSpec::MinMax => FittedStage::MinMax(minmax_fit(train)?),
        StageSpec::Impute { k } => FittedStage::Impute(knn_impute_fit(train, *k)?),
        StageSpec::Standardize => FittedStage::Standardize(standard_fit(train)?),
    })
}

fn apply_stage(stage: &FittedStage, frame: &Frame) -> Result<Frame> {
    match stage {
        FittedStage::Project { features } => frame.project(features),
        FittedStage::Encode(m) => onehot_apply(frame, m),
        FittedStage::MinMax(p) => minmax_apply(frame, p),
        FittedStage::Impute(m) => knn_impute_apply(frame, m),
        FittedStage::Standardize(p) => standard_apply(frame, p),
    }
}

/// Fits every stage on `train` only: stage `i` is fitted on the output of
/// stages `0..i` applied to `train`.
pub fn pipeline_fit(train: &Frame, stages: &[StageSpec]) -> Result<FittedPipeline> {
    check_order(stages)?;
    let mut current = train.clone();
    let mut fitted = Vec::with_capacity(stages.len());
    for spec in stages {
        let stage = fit_stage(spec, &current)?;
        current = apply_stage(&stage, &current)?;
        fitted.push(StageRecord {
            stage,
            provenance: Provenance::Train,
            fitted_rows: train.n_rows(),
        });
    }
    Ok(FittedPipeline {
        version: PIPELINE_FORMAT_VERSION,
        stages: fitted,
    })
}

/// Replays the fitted stages in order. Refuses pipelines whose parameters
/// did not come from the training partition or whose order is invalid.
pub fn pipeline_apply(frame: &Frame, fitted: &FittedPipeline) -> Result<Frame> {
    if fitted.version != PIPELINE_FORMAT_VERSION {
        return Err(Error::State(format!("unsupported pipeline version {}", fitted.version)));
    }
    let stages: Vec<&FittedStage> = fitted.stages.iter().map(|s| &s.stage).collect();
    check_order_refs(&stages)?;
    if let Some(bad) = fitted.stages.iter().find(|s| s.provenance != Provenance::Train) {
        return Err(Error::State(format!(
            "stage `{}` was not fitted on the training partition",
            bad.stage.name()
        )));
    }
    let mut current = frame.clone();
    for rec in &fitted.stages {
        current = apply_stage(&rec.stage, &current)?;
    }
    Ok(current)
}

/// Stateful wrapper: declare stages, fit once, apply many times.
#[derive(Debug, Clone)]
pub struct Pipeline {
    stages: Vec<StageSpec>,
    fitted: Option<FittedPipeline>,
}

impl Pipeline {
    pub fn new(stages: Vec<StageSpec>) -> Result<Self> {
        check_order(&stages)?;
        Ok(Pipeline { stages, fitted: None })
    }

    pub fn fit(&mut self, train: &Frame) -> Result<&FittedPipeline> {
        self.fitted = Some(pipeline_fit(train, &self.stages)?);
        Ok(self.fitted.as_ref().expect("just set"))
    }

    pub fn apply(&self, frame: &Frame) -> Result<Frame> {
        match &self.fitted {
            Some(f) => pipeline_apply(frame, f),
            None => Err(Error::State("pipeline applied before it was fitted".into())),
        }
    }

    pub fn fitted(&self) -> Option<&FittedPipeline> {
        self.fitted.as_ref()
    }
}

/// The training-side preparation preceding resampling: encode, min-max,
/// impute.
pub fn preparation_stages(k_impute: usize) -> Vec<StageSpec> {
    vec![StageSpec::Encode, StageSpec::MinMax, StageSpec::Impute { k: k_impute }]
}
