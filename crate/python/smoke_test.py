"""Smoke test for the leakless_py extension.

Build and install first:

    pip install maturin
    maturin develop --release -m crates/python/Cargo.toml

then run `python python/smoke_test.py` from the repository root.
"""

import json
import os
import sys

import leakless_py as lk

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.environ.get("LEAKLESS_DATASET", os.path.join(ROOT, "data", "chronic_kidney_disease_full.arff"))


def check(cond, msg):
    if not cond:
        print(f"FAIL: {msg}")
        sys.exit(1)
    print(f"ok: {msg}")


def main():
    frame = lk.load_dataset(DATA)
    check(frame.n_rows == 400, "400 rows")
    check(frame.class_counts() == {"ckd": 250, "notckd": 150}, "250 ckd / 150 notckd")
    check(frame.find_duplicates() == [], "no duplicate rows")

    train, test = lk.split(frame, 0.75, seed=7)
    check((len(train), len(test)) == (300, 100), "75/25 split")

    pipe = lk.FittedPipeline.fit(train, k_impute=5, standardize=True)
    check(pipe.stages == ["encode", "min_max", "impute", "standardize"], "pipeline stage order")
    prepared = pipe.apply(train)
    check(prepared.count_missing() == 0, "imputation leaves no gaps")
    again = lk.FittedPipeline.from_json(pipe.to_json())
    check(again.apply(test).to_rows() == pipe.apply(test).to_rows(), "pipeline JSON round trip")

    model = lk.TrainedModel.fit("rforest", prepared, seed=1, ensemble_size=50)
    metrics = model.evaluate(pipe.apply(test))
    check(metrics["accuracy"] >= 0.9, f"forest test accuracy {metrics['accuracy']:.2f}")
    restored = lk.TrainedModel.from_json(model.to_json())
    check(restored.score(prepared) == model.score(prepared), "model JSON round trip")

    check(lk.auc([1, 1, 0, 0], [0.9, 0.3, 0.8, 0.2]) == 0.75, "pairwise AUC")
    scores = lk.lof_scores([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [10.0, 10.0]], k=2)
    check(scores[-1] > 1.5, "isolated point has a large outlier factor")

    cfg = lk.ExperimentConfig(json.dumps({"dataset": DATA, "seed": 3, "feature_sets": "f1"})).ci_profile()
    report = lk.run(cfg)
    cells = report.cells()
    check(len(cells) == 9, "nine models on F1")
    check(json.loads(report.to_json())["dataset"]["rows"] == 400, "report JSON")
    check(report.deterministic_json() == lk.run(cfg).deterministic_json(), "deterministic rerun")
    print(report.compare(["IV"]).splitlines()[2])

    try:
        lk.ExperimentConfig(json.dumps({"split_ratio": 0}))
    except ValueError:
        check(True, "invalid config raises ValueError")
    else:
        check(False, "invalid config raises ValueError")


if __name__ == "__main__":
    main()
