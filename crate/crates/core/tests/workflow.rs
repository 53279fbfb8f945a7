mod common;

use leakless::evaluate::CvMode;
use leakless::experiment::{run, ExperimentConfig, FeatureSetChoice, FeatureSetId, ResampleMode, RunReport};
use leakless::models::Algorithm;

/// CI profile with a shorter CV schedule.
fn light(seed: u64) -> ExperimentConfig {
    let mut cfg = common::ci_config(seed);
    cfg.cv.repeats = 2;
    cfg
}

#[test]
fn identical_configs_give_identical_reports() {
    let cfg = light(7);
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.deterministic_json().unwrap(), b.deterministic_json().unwrap());
    assert!(!a.deterministic_json().unwrap().contains("wall_clock_seconds"));

    let back = RunReport::from_json(&a.to_json().unwrap()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn all_sets_run_is_a_superset_of_single_set_runs() {
    let all = run(&light(3)).unwrap();
    for (choice, id) in [
        (FeatureSetChoice::F1, FeatureSetId::F1),
        (FeatureSetChoice::F2, FeatureSetId::F2),
        (FeatureSetChoice::F3, FeatureSetId::F3),
    ] {
        let mut cfg = light(3);
        cfg.feature_sets = choice;
        let single = run(&cfg).unwrap();
        assert_eq!(single.selection, all.selection);
        for cell in &single.cells {
            assert_eq!(cell.feature_set, id);
            assert_eq!(all.cell(id, cell.model), Some(cell), "{} {}", id.name(), cell.model);
        }
        let expected = all.cells.iter().filter(|c| c.feature_set == id).count();
        assert_eq!(single.cells.len(), expected);
    }
}

#[test]
fn config_round_trips_through_json_and_files() {
    let mut cfg = common::ci_config(11);
    cfg.cv.mode = CvMode::Strict;
    cfg.resample_mode = ResampleMode::PerFeatureSet;
    cfg.feature_sets = FeatureSetChoice::F2;
    cfg.models = vec![Algorithm::Knn, Algorithm::Dtree];
    let text = cfg.to_json().unwrap();
    assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, &text).unwrap();
    assert_eq!(ExperimentConfig::from_path(&path).unwrap(), cfg);

    assert!(ExperimentConfig::from_json(r#"{"seed": 1, "surprise": true}"#).is_err());
}

#[test]
fn strict_mode_refits_inside_folds() {
    let mut cfg = common::ci_config(5);
    cfg.cv = leakless::experiment::CvConfig {
        folds: 5,
        repeats: 1,
        mode: CvMode::Strict,
    };
    cfg.feature_sets = FeatureSetChoice::F2;
    cfg.models = vec![Algorithm::Knn, Algorithm::GaussianNb, Algorithm::Dtree];
    let strict = run(&cfg).unwrap();
    assert_eq!(strict.cv_mode, "strict");
    cfg.cv.mode = CvMode::PaperFaithful;
    let faithful = run(&cfg).unwrap();
    assert_eq!(faithful.cv_mode, "paper-faithful");
    for alg in &cfg.models {
        let (s, f) = (strict.cell(FeatureSetId::F2, *alg).unwrap(), faithful.cell(FeatureSetId::F2, *alg).unwrap());
        assert_eq!(s.cv.accuracies.len(), 5);
        assert!((0.0..=1.0).contains(&s.cv.mean));
        // Test evaluation does not depend on the CV protocol.
        assert_eq!(s.test, f.test);
    }
}

#[test]
fn per_feature_set_mode_resamples_each_set() {
    let mut cfg = light(9);
    cfg.resample_mode = ResampleMode::PerFeatureSet;
    cfg.models = vec![Algorithm::Logistic];
    let report = run(&cfg).unwrap();
    let scopes: Vec<&str> = report.resampling.iter().map(|r| r.scope.as_str()).collect();
    assert_eq!(scopes[0], "all");
    for id in report.feature_sets.keys() {
        let rec = report.resampling.iter().find(|r| r.scope == id.name()).unwrap();
        assert_eq!(rec.features, report.feature_sets[id].len());
        let counts: Vec<usize> = rec.after_smote.values().copied().collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]));
    }
}
