"""Several SVMs, one per feature group, fused into a graded risk call.

Uses the breast-cancer file from data/ (see scripts/prepare_datasets.py).

Run: python3 demos/03_risk_pipeline.py
"""

from pathlib import Path

import numpy as np

from svmer import KernelSpec, TrainConfig, train
from svmer.assess import BeliefMapping, PipelineIndex, SvmErPipeline
from svmer.data import SplitSpec, apply_scaling, fit_scaling, load_dataset, split
from svmer.er import GradeSet
from svmer.evaluation import confusion, metrics

path = Path(__file__).resolve().parent.parent / "data" / "wdbc.data"
ds = load_dataset("bcds", path)
train_raw, test_raw = split(ds, SplitSpec(455, 114, seed=42))
scaling = fit_scaling(train_raw)
train_set = apply_scaling(train_raw, scaling)

# The 30 columns are mean / standard error / worst of ten measurements.
groups = {"mean": range(0, 10), "stderr": range(10, 20), "worst": range(20, 30)}
weights = {"mean": 0.6, "stderr": 0.3, "worst": 0.8}

indexes = []
for name, cols in groups.items():
    cols = tuple(cols)
    model, trace = train(train_set.select_features(cols), KernelSpec.rbf(0.5), TrainConfig(penalty=10.0))
    print(f"{name:7s}: {model.n_support} support vectors, {trace.epochs} epochs")
    indexes.append(PipelineIndex(name, weights[name], model, cols))

pipe = SvmErPipeline(
    tuple(indexes),
    BeliefMapping(steepness=2.0),
    GradeSet(("secure", "at-risk"), (0.0, 1.0)),
    scaling=scaling,
)

reports = pipe.assess_many(test_raw.features)
for ra, truth in list(zip(reports, test_raw.labels))[:5]:
    per_index = ", ".join(f"{x['id']}={x['decision_value']:+.2f}" for x in ra.inputs)
    print(f"truth {truth:+d} -> {ra.grade:8s} score {ra.score.score:.3f} "
          f"[{ra.score.lower:.3f}, {ra.score.upper:.3f}]  ({per_index})")

pred = np.array([1 if ra.grade == "at-risk" else -1 for ra in reports])
m = metrics(confusion(pred, test_raw.labels))
print(f"\nfused: recall {m.recall:.3f} precision {m.precision:.3f} accuracy {m.accuracy:.3f}")
