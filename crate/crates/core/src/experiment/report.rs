use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::config::FeatureSetId;
use super::run::{CellReport, RunReport};
use crate::dataset::attribute_name;

fn counts(map: &BTreeMap<String, usize>) -> String {
    map.iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join(" / ")
}

fn long(code: &str) -> String {
    attribute_name(code).map_or_else(|| code.to_string(), |n| n.to_string())
}

impl RunReport {
    /// Human-readable report in the shape of the published tables.
    pub fn to_markdown(&self) -> String {
        let mut md = String::new();
        let _ = writeln!(md, "# Run report (seed {}, {} CV)\n", self.config.seed, self.cv_mode);
        let d = &self.dataset;
        let _ = writeln!(
            md,
            "Dataset `{}`: {} rows, {} features, classes {}, {} missing cells, {} duplicate pairs.\n",
            d.path,
            d.rows,
            d.features,
            counts(&d.classes),
            d.missing_cells,
            d.duplicate_pairs
        );
        let s = &self.split;
        let _ = writeln!(
            md,
            "Split ({}, ratio {}): train {} ({}), test {} ({}).\n",
            if s.stratified { "stratified" } else { "shuffled" },
            s.ratio,
            s.train_rows,
            counts(&s.train_classes),
            s.test_rows,
            counts(&s.test_classes)
        );

        md.push_str("## Class counts through resampling\n\n| Scope | Step | Counts |\n|---|---|---|\n");
        for r in &self.resampling {
            let _ = writeln!(md, "| {} | Training set | {} |", r.scope, counts(&r.training));
            let _ = writeln!(md, "| {} | LOF ({} removed) | {} |", r.scope, r.lof_removed, counts(&r.after_lof));
            let _ = writeln!(md, "| {} | SMOTE (+{}) | {} |", r.scope, r.smote_synthetic, counts(&r.after_smote));
        }
        md.push('\n');

        md.push_str(&self.selection.to_markdown());
        md.push_str("\n### Reference pairs\n\n| Feature | Feature | Correlation (%) |\n|---|---|---|\n");
        for p in &self.reference_correlations {
            let _ = writeln!(md, "| {} | {} | {:.0} |", long(&p.a), long(&p.b), p.r * 100.0);
        }
        md.push('\n');

        let sets: Vec<FeatureSetId> = self.feature_sets.keys().copied().collect();
        md.push_str("## Feature sets\n\n");
        for (id, features) in &self.feature_sets {
            let names: Vec<String> = features.iter().map(|f| long(f)).collect();
            let _ = writeln!(md, "- {} ({}): {}", id.name(), features.len(), names.join(", "));
        }
        md.push('\n');

        md.push_str("## Cross-validation mean accuracy (%)\n\n| Model |");
        for id in &sets {
            let _ = write!(md, " {} ({}) |", id.name(), self.feature_sets[id].len());
        }
        md.push_str("\n|---|");
        md.push_str(&"---|".repeat(sets.len()));
        md.push('\n');
        for model in self.models() {
            let _ = write!(md, "| {} |", model.display_name());
            for id in &sets {
                match self.cell(*id, model) {
                    Some(c) => {
                        let _ = write!(md, " {:.2} (sd {:.2}) |", c.cv.mean * 100.0, c.cv.std * 100.0);
                    }
                    None => md.push_str(" - |"),
                }
            }
            md.push('\n');
        }
        md.push('\n');

        for id in &sets {
            let cells: Vec<&CellReport> = self.cells.iter().filter(|c| c.feature_set == *id).collect();
            if cells.is_empty() {
                continue;
            }
            let _ = writeln!(
                md,
                "## Test evaluation, {} ({} features)\n\n| Model | Accuracy | F1-Score (macro avg.) | AUC (macro avg.) | TP | TN | FP | FN |\n|---|---|---|---|---|---|---|---|",
                id.name(),
                self.feature_sets[id].len()
            );
            for c in cells {
                let k = &c.test.confusion;
                let _ = writeln!(
                    md,
                    "| {} | {:.0} | {:.0} | {:.2} | {} | {} | {} | {} |",
                    c.model.display_name(),
                    c.test.accuracy * 100.0,
                    c.test.f1_macro * 100.0,
                    c.test.auc_macro * 100.0,
                    k.tp,
                    k.tn,
                    k.fp,
                    k.fn_
                );
            }
            md.push('\n');
        }

        if !self.warnings.is_empty() || self.cells.iter().any(|c| !c.warnings.is_empty()) {
            md.push_str("## Warnings\n\n");
            for w in &self.warnings {
                let _ = writeln!(md, "- {w}");
            }
            for c in &self.cells {
                for w in &c.warnings {
                    let _ = writeln!(md, "- {} {}: {w}", c.feature_set.name(), c.model.display_name());
                }
            }
            md.push('\n');
        }

        md.push_str("## Assumptions\n\n");
        for (k, v) in &self.assumptions {
            let _ = writeln!(md, "- {k}: {v}");
        }
        let _ = writeln!(md, "\nWall clock: {:.1} s.", self.wall_clock_seconds);
        md
    }

    fn models(&self) -> Vec<crate::models::Algorithm> {
        let mut seen = Vec::new();
        for c in &self.cells {
            if !seen.contains(&c.model) {
                seen.push(c.model);
            }
        }
        seen
    }
}
