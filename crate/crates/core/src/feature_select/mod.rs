//! Hybrid feature selection: filter scores, wrapper elimination, ensemble
//! importances and correlation pruning combined by set algebra into three
//! nested feature subsets.

mod correlation;
mod filter;
mod sets;
mod wrapper;

pub use correlation::{correlated_pairs, high_corr_set, pearson_matrix, CorrelatedPair};
pub use filter::{chi2_scores, mi_plugin, mi_scores, top_fraction, ScoreTable};
pub use sets::{assemble_sets, FeatureSet, SelectionSets};
pub use wrapper::{importance_select, rfecv, ImportanceResult, RfecvResult};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{attribute_name, Frame};
use crate::error::{Error, Result};
use crate::models::{ClassCriterion, MaxFeatures, ModelParams, ModelSpec};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    pub top_fraction: f64,
    pub mi_neighbors: usize,
    pub corr_threshold: f64,
    /// Pairs at or above this level are listed in the correlation table.
    pub corr_report_threshold: f64,
    pub rfecv_folds: usize,
    pub importance_repeats: usize,
    /// Trees / boosting stages of the wrapper and importance ensembles.
    pub ensemble_size: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            top_fraction: 0.70,
            mi_neighbors: 3,
            corr_threshold: 0.85,
            corr_report_threshold: 0.70,
            rfecv_folds: 10,
            importance_repeats: 5,
            ensemble_size: 1000,
        }
    }
}

impl SelectionConfig {
    pub fn gboost_spec(&self) -> ModelSpec {
        ModelSpec {
            params: ModelParams::Gboost {
                n_stages: self.ensemble_size,
                learning_rate: 0.01,
                max_depth: 3,
            },
            seed: 0,
        }
    }

    pub fn forest_spec(&self) -> ModelSpec {
        ModelSpec {
            params: ModelParams::Rforest {
                n_trees: self.ensemble_size,
                criterion: ClassCriterion::Gini,
                max_depth: None,
                max_features: MaxFeatures::Sqrt,
            },
            seed: 0,
        }
    }

    pub fn logistic_spec(&self) -> ModelSpec {
        ModelSpec {
            params: ModelParams::Logistic {
                c: 1.0,
                max_iter: 100,
                tol: 1e-6,
            },
            seed: 0,
        }
    }

    pub fn tree_spec(&self) -> ModelSpec {
        ModelSpec {
            params: ModelParams::Dtree {
                criterion: ClassCriterion::Entropy,
                max_depth: None,
            },
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub seed: u64,
    pub config: SelectionConfig,
    pub features: Vec<String>,
    pub rows: usize,
    pub chi2: ScoreTable,
    pub mi: ScoreTable,
    pub rfecv: Vec<RfecvResult>,
    pub importance: Vec<ImportanceResult>,
    pub correlated: Vec<CorrelatedPair>,
    pub sets: SelectionSets,
    pub notes: Vec<String>,
}

/// Runs every scorer on the prepared training frame (encoded, scaled,
/// imputed and resampled) and assembles the three subsets.
pub fn select_features(frame: &Frame, positive: &str, cfg: &SelectionConfig, seed_value: u64) -> Result<SelectionReport> {
    let names = frame.feature_names();
    if names.is_empty() {
        return Err(Error::argument("no features to select from"));
    }
    let x = frame.feature_matrix()?;
    let y = frame.targets(positive)?;
    let derive = |label: &str| seed::derive(seed_value, label, 0);

    let chi2 = chi2_scores(&names, &x, &y)?;
    let mi = mi_scores(&names, &x, &y, cfg.mi_neighbors, derive("mi"))?;
    let chi2_top = top_fraction(&chi2, cfg.top_fraction)?;
    let mi_top = top_fraction(&mi, cfg.top_fraction)?;

    let r_g = rfecv(&names, &x, &y, &cfg.gboost_spec(), cfg.rfecv_folds, derive("rfecv-gboost"))?;
    let r_r = rfecv(&names, &x, &y, &cfg.forest_spec(), cfg.rfecv_folds, derive("rfecv-rforest"))?;
    let r_l = rfecv(&names, &x, &y, &cfg.logistic_spec(), cfg.rfecv_folds, derive("rfecv-logistic"))?;

    let rf = importance_select(&names, &x, &y, &cfg.forest_spec(), cfg.importance_repeats, derive("importance-rforest"))?;
    let dt = importance_select(&names, &x, &y, &cfg.tree_spec(), cfg.importance_repeats, derive("importance-dtree"))?;

    let corr = pearson_matrix(&x);
    let s_cor = high_corr_set(&names, &corr, &chi2, cfg.corr_threshold)?;
    let correlated = correlated_pairs(&names, &corr, cfg.corr_report_threshold);

    let sets = assemble_sets(
        chi2_top,
        mi_top,
        r_g.selected.clone(),
        r_r.selected.clone(),
        r_l.selected.clone(),
        rf.selected.clone(),
        dt.selected.clone(),
        s_cor,
    );
    Ok(SelectionReport {
        seed: seed_value,
        config: cfg.clone(),
        features: names,
        rows: frame.n_rows(),
        chi2,
        mi,
        rfecv: vec![r_g, r_r, r_l],
        importance: vec![rf, dt],
        correlated,
        sets,
        notes: vec![
            "scorers run on the training partition after oversampling".into(),
            "correlations are computed on the same prepared training rows".into(),
        ],
    })
}

fn long(code: &str) -> String {
    attribute_name(code).map_or_else(|| code.to_string(), |n| format!("{n} ({code})"))
}

fn list(set: &FeatureSet) -> String {
    if set.is_empty() {
        return "(none)".into();
    }
    set.iter().map(|c| long(c)).collect::<Vec<_>>().join(", ")
}

impl SelectionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_markdown(&self) -> String {
        let mut md = String::new();
        let _ = writeln!(md, "## Feature selection (seed {})\n", self.seed);
        let _ = writeln!(md, "{} training rows, {} candidate features.\n", self.rows, self.features.len());
        let _ = writeln!(
            md,
            "### Correlated features (|r| >= {:.0}%)\n",
            self.config.corr_report_threshold * 100.0
        );
        md.push_str("| Feature | Feature | Correlation (%) |\n|---|---|---|\n");
        for p in &self.correlated {
            let _ = writeln!(md, "| {} | {} | {:.0} |", long(&p.a), long(&p.b), p.r * 100.0);
        }
        md.push_str("\n### Constituent sets\n\n");
        let s = &self.sets;
        for (name, set) in [
            ("Chi2", &s.chi2),
            ("MI", &s.mi),
            ("R_G", &s.r_g),
            ("R_R", &s.r_r),
            ("R_L", &s.r_l),
            ("RF", &s.rf),
            ("DT", &s.dt),
            ("S_w", &s.s_w),
            ("S_f", &s.s_f),
            ("S_e", &s.s_e),
            ("S_cor", &s.s_cor),
        ] {
            let _ = writeln!(md, "- **{name}** ({}): {}", set.len(), list(set));
        }
        md.push_str("\n### Selected subsets\n\n");
        for (name, set) in [("F1", &s.f1), ("F2", &s.f2), ("F3", &s.f3)] {
            let _ = writeln!(md, "- **{name}** ({} features): {}", set.len(), list(set));
        }
        md
    }
}
