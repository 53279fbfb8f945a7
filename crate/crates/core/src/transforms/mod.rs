//! Preprocessing stages fitted on the training partition and replayed on any
//! frame: binary encoding, min-max scaling, KNN imputation and
//! standardization.

mod encode;
mod impute;
mod minmax;
mod pipeline;
mod standard;

pub use encode::{onehot_apply, onehot_fit, EncoderMap};
pub use impute::{knn_impute_apply, knn_impute_fit, nan_euclidean, ImputerModel, Weighting};
pub use minmax::{minmax_apply, minmax_fit, ColumnRange, MinMaxParams};
pub use pipeline::{
    pipeline_apply, pipeline_fit, preparation_stages, FittedPipeline, FittedStage, Pipeline,
    Provenance, StageRecord, StageSpec, PIPELINE_FORMAT_VERSION,
};
pub use standard::{standard_apply, standard_fit, ColumnMoments, StandardParams};
