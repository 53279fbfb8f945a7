//! End-to-end workflow: configuration, the staged runner, reports and the
//! comparison against published values.

mod config;
mod paper;
mod report;
mod run;

pub use config::{
    CvConfig, ExperimentConfig, FeatureSetChoice, FeatureSetId, PipelineConfig, ResampleMode, DATASET_ENV,
};
pub use paper::{compare, test_reference, table_iv, Comparison, ComparisonRow, Mark, PaperTable};
pub use run::{
    assumptions, build_sets, cv_seed, finish_set, load, model_seed, prepare, reference_correlations, resample_train,
    run, select, selection_seed, set_features, split_seed, train_set, validate_set, CellReport, DatasetSummary,
    Loaded, PreparedSet, ResampleRecord, Resampled, RunReport, SplitSummary, Versions,
};

/// Published reference values.
pub mod reference {
    pub use super::paper::*;
}
