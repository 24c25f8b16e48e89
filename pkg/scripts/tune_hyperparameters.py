#!/usr/bin/env python3
"""Pick SVM hyperparameters per benchmark by cross-validation on the
training split only.

Protocol (fixed before looking at any test result):
  * the seeded train split from the experiment config (seed 42)
  * 5 folds from a seed-0 permutation of the training rows, scaling
    refit on every fold
  * grid: rbf gamma in {0.01, 0.05, 0.1, 0.5, 1, 2} and the linear kernel,
    penalty D in {0.1, 1, 10}, post-hoc bias off/on
  * criterion: mean fold F1 of the positive class; ties keep the earlier
    grid point

Prints the ranking and the winning configuration as JSON.
"""

from __future__ import annotations

import argparse
import itertools
import json
import warnings
from pathlib import Path

import numpy as np

from svmer.data import apply_scaling, fit_scaling, split, SplitSpec
from svmer.evaluation import _load, confusion, metrics, resolve_experiment
from svmer.kernels import KernelSpec
from svmer.svm import TrainConfig, predict_many, train

KERNELS = [{"kind": "rbf", "gamma": g} for g in (0.01, 0.05, 0.1, 0.5, 1.0, 2.0)] + [{"kind": "linear"}]
PENALTIES = (0.1, 1.0, 10.0)
BIAS = (False, True)


def cv_score(train_set, kernel, tc, folds, scaling_mode):
    scores = []
    for f in folds:
        mask = np.ones(len(train_set), bool)
        mask[f] = False
        fit_part, val_part = train_set.subset(np.flatnonzero(mask)), train_set.subset(f)
        sp = fit_scaling(fit_part, scaling_mode)
        model, _ = train(apply_scaling(fit_part, sp), kernel, tc)
        pred = predict_many(model, sp.transform(val_part.features))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            scores.append(metrics(confusion(pred, val_part.labels)).f1)
    return float(np.mean(scores))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("datasets", nargs="*", default=["hdds", "bcds", "ids"])
    ap.add_argument("--data-dir", default="data")
    ap.add_argument("--folds", type=int, default=5)
    args = ap.parse_args(argv)

    cfg = resolve_experiment({"data_dir": args.data_dir})
    chosen = {}
    for dataset_id in args.datasets:
        ds_cfg = cfg["datasets"][dataset_id]
        ds = _load(dataset_id, ds_cfg, Path(cfg["data_dir"]))
        train_raw, _ = split(ds, SplitSpec(ds_cfg["train"], ds_cfg["test"], cfg["seed"], cfg["stratified"]))
        folds = np.array_split(np.random.default_rng(0).permutation(len(train_raw)), args.folds)
        rows = []
        for kernel, D, bias in itertools.product(KERNELS, PENALTIES, BIAS):
            tc = TrainConfig(penalty=D, fit_bias=bias)
            score = cv_score(train_raw, KernelSpec.from_dict(kernel), tc, folds, cfg["scaling"])
            rows.append((score, kernel, D, bias))
        best = max(rows, key=lambda r: r[0])  # max() keeps the first of equal scores
        for score, kernel, D, bias in sorted(rows, key=lambda r: -r[0])[:5]:
            print(f"{dataset_id:5s} f1={score:.4f} kernel={kernel} D={D} bias={bias}")
        chosen[dataset_id] = {"kernel": best[1], "train_config": {"penalty": best[2], "fit_bias": best[3]}}
    print(json.dumps(chosen, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
