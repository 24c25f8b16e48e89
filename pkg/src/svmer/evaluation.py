"""Confusion-matrix metrics, the benchmark comparison report and the
iteration-vs-overhead timing harness.

+1 is the positive class throughout.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import er
from .assess import BeliefMapping, PipelineIndex, SvmErPipeline, config_hash, map_decision_to_beliefs
from .data import (
    CsvSchema, Dataset, SplitSpec, apply_scaling, builtin_schema, fit_scaling, load_csv, split,
)
from .kernels import KernelSpec
from .naive_bayes import nb_fit, nb_predict_many
from .svm import TrainConfig, train

REPORT_VERSION = 1

# Recall / precision printed for each benchmark (SVM-ER vs naive method).
PAPER_REFERENCE = {
    "hdds": {"svm_er": {"recall": 0.8370, "precision": 0.8545}, "naive": {"recall": 0.8180, "precision": 0.8230}},
    "bcds": {"svm_er": {"recall": 0.9420, "precision": 0.9215}, "naive": {"recall": 0.9110, "precision": 0.8920}},
    "ids": {"svm_er": {"recall": 0.7640, "precision": 0.9140}, "naive": {"recall": 0.7476, "precision": 0.8920}},
}

# Hyperparameters chosen by 5-fold cross-validated F1 on each training
# split (scripts/tune_hyperparameters.py); the test rows were not consulted.
DEFAULT_EXPERIMENT: dict = {
    "seed": 42,
    "data_dir": "data",
    "scaling": "minmax",
    "stratified": True,
    "variance_floor": 1e-9,
    "belief_mapping": {"mode": "logistic", "steepness": 1.0, "bin_edges": [], "grade_count": 2, "invert": False},
    "grades": {"grades": [{"name": "secure", "utility": 0.0}, {"name": "at-risk", "utility": 1.0}], "fuzzy": False},
    "datasets": {
        "hdds": {
            "file": "processed.cleveland.data", "train": 230, "test": 62,
            "kernel": {"kind": "rbf", "gamma": 0.05},
            "train_config": {"penalty": 10.0, "learning_rate": 1.0, "tolerance": 1e-6, "max_epochs": 1000, "fit_bias": True},
            "indexes": None,
        },
        "bcds": {
            "file": "wdbc.data", "train": 455, "test": 114,
            "kernel": {"kind": "rbf", "gamma": 0.5},
            "train_config": {"penalty": 10.0, "learning_rate": 1.0, "tolerance": 1e-6, "max_epochs": 1000, "fit_bias": False},
            "indexes": None,
        },
        "ids": {
            "file": "ionosphere.data", "train": 263, "test": 80,
            "kernel": {"kind": "rbf", "gamma": 2.0},
            "train_config": {"penalty": 0.1, "learning_rate": 1.0, "tolerance": 1e-6, "max_epochs": 1000, "fit_bias": True},
            "indexes": None,
        },
    },
}


class EvaluationError(ValueError):
    pass


class DatasetMissing(FileNotFoundError):
    def __init__(self, dataset_id: str, path: Path):
        super().__init__(f"dataset {dataset_id!r} not found at {path}")
        self.dataset_id = dataset_id
        self.path = path


# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def swapped(self) -> "ConfusionMatrix":
        """Same counts with -1 treated as the positive class."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)


def confusion(predictions: Sequence[int], truth: Sequence[int]) -> ConfusionMatrix:
    p = np.asarray(predictions).reshape(-1)
    t = np.asarray(truth).reshape(-1)
    if p.shape != t.shape:
        raise EvaluationError(f"{p.size} predictions for {t.size} labels")
    if p.size == 0:
        raise EvaluationError("nothing to evaluate")
    if not (np.isin(p, (-1, 1)).all() and np.isin(t, (-1, 1)).all()):
        raise EvaluationError("labels must be -1 or +1")
    pos_p, pos_t = p == 1, t == 1
    return ConfusionMatrix(
        tp=int((pos_p & pos_t).sum()),
        fp=int((pos_p & ~pos_t).sum()),
        fn=int((~pos_p & pos_t).sum()),
        tn=int((~pos_p & ~pos_t).sum()),
    )


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    accuracy: float
    confusion: ConfusionMatrix
    warnings: tuple[str, ...] = ()
    dataset: str | None = None
    model: str | None = None
    split: dict | None = None
    hyperparameters: dict | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        return d


def _ratio(num: int, den: int, name: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(f"{name} undefined (zero denominator); reported as 0")
        return 0.0
    return num / den


def metrics(cm: ConfusionMatrix, **meta) -> MetricsReport:
    """Precision, recall, F1 and accuracy; zero denominators give 0 plus a warning."""
    if cm.total <= 0:
        raise EvaluationError("confusion matrix is empty")
    flags: list[str] = []
    precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", flags)
    recall = _ratio(cm.tp, cm.tp + cm.fn, "recall", flags)
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        flags.append("f1 undefined (precision + recall = 0); reported as 0")
        f1 = 0.0
    accuracy = (cm.tp + cm.tn) / cm.total
    for msg in flags:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return MetricsReport(precision, recall, f1, accuracy, cm, tuple(flags), **meta)


# ---------------------------------------------------------------------------
# experiment configuration


def merge_config(base: Mapping, override: Mapping | None) -> dict:
    """Recursive dict merge; ``override`` wins at every leaf it names."""
    out = copy.deepcopy(dict(base))
    for key, value in (override or {}).items():
        if isinstance(value, Mapping) and isinstance(out.get(key), Mapping):
            out[key] = merge_config(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def resolve_experiment(config: Mapping | None = None) -> dict:
    return merge_config(DEFAULT_EXPERIMENT, config)


def _grade_set(cfg: Mapping) -> er.GradeSet:
    grades, _ = er.load_assessment_spec(cfg["grades"])
    return grades


def _load(dataset_id: str, ds_cfg: Mapping, data_dir: Path) -> Dataset:
    path = Path(ds_cfg.get("path") or data_dir / ds_cfg["file"])
    if not path.exists():
        raise DatasetMissing(dataset_id, path)
    schema = ds_cfg.get("schema")
    if schema is None:
        schema = builtin_schema(dataset_id)
    elif isinstance(schema, Mapping):
        schema = CsvSchema.from_dict(schema)
    else:
        schema = CsvSchema.from_json(schema)
    return load_csv(path, schema, name=dataset_id)


@dataclass
class PreparedRun:
    dataset_id: str
    rows: int
    split: SplitSpec
    train: Dataset
    test: Dataset
    pipeline: SvmErPipeline
    nb_model: object
    svm_converged: list[bool]
    svm_epochs: list[int]
    timing: dict = field(default_factory=dict)


def prepare_run(dataset_id: str, config: Mapping) -> PreparedRun:
    """Load, split, scale and train both models for one benchmark dataset."""
    cfg = resolve_experiment(config)
    if dataset_id not in cfg["datasets"]:
        raise EvaluationError(f"no configuration for dataset {dataset_id!r}")
    ds_cfg = cfg["datasets"][dataset_id]
    ds = _load(dataset_id, ds_cfg, Path(cfg["data_dir"]))
    spec = SplitSpec(int(ds_cfg["train"]), int(ds_cfg["test"]), int(cfg["seed"]), bool(cfg["stratified"]))
    raw_train, raw_test = split(ds, spec)
    scaling = fit_scaling(raw_train, cfg["scaling"])
    train_set = apply_scaling(raw_train, scaling)

    kernel = KernelSpec.from_dict(ds_cfg["kernel"])
    tc = TrainConfig.from_dict({**ds_cfg["train_config"], "seed": int(cfg["seed"])})
    groups = ds_cfg.get("indexes") or [{"id": "svm", "weight": 1.0, "columns": None}]
    timing = {}
    t0 = time.perf_counter()
    pipe_indexes, converged, epochs = [], [], []
    for g in groups:
        cols = None if g.get("columns") is None else tuple(int(c) for c in g["columns"])
        sub = train_set if cols is None else train_set.select_features(cols)
        model, trace = train(sub, kernel, tc)
        pipe_indexes.append(PipelineIndex(str(g["id"]), float(g["weight"]), model, cols))
        converged.append(trace.converged)
        epochs.append(trace.epochs)
    timing["svm_train_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    nb = nb_fit(train_set, float(cfg["variance_floor"]))
    timing["nb_train_s"] = time.perf_counter() - t0

    pipeline = SvmErPipeline(
        tuple(pipe_indexes),
        BeliefMapping.from_dict(cfg["belief_mapping"]),
        _grade_set(cfg),
        scaling=scaling,
        provenance={"dataset": dataset_id, "config_hash": config_hash(cfg)},
    )
    return PreparedRun(dataset_id, len(ds), spec, raw_train, raw_test, pipeline, nb,
                       converged, epochs, timing)


# ---------------------------------------------------------------------------
# benchmark comparison


def run_table1(config: Mapping | None = None, datasets: Sequence[str] | None = None) -> dict:
    """Train SVM-ER and the naive baseline on identical splits per dataset.

    Everything outside the top-level ``timing`` key is deterministic for a
    fixed configuration.
    """
    cfg = resolve_experiment(config)
    ids = list(datasets or cfg["datasets"].keys())
    entries, timing = [], {}
    for dataset_id in ids:
        run = prepare_run(dataset_id, cfg)
        t0 = time.perf_counter()
        svm_pred = run.pipeline.predict(run.test.features)
        timing_pred = time.perf_counter() - t0
        scaled_test = run.pipeline.scaling.transform(run.test.features)
        nb_pred = nb_predict_many(run.nb_model, scaled_test)
        truth = run.test.labels

        split_info = asdict(run.split)
        ds_cfg = cfg["datasets"][dataset_id]
        hyper = {"kernel": ds_cfg["kernel"], "train_config": ds_cfg["train_config"],
                 "scaling": cfg["scaling"], "variance_floor": cfg["variance_floor"]}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            cm_svm, cm_nb = confusion(svm_pred, truth), confusion(nb_pred, truth)
            m_svm = metrics(cm_svm, dataset=dataset_id, model="svm_er", split=split_info, hyperparameters=hyper)
            m_nb = metrics(cm_nb, dataset=dataset_id, model="naive", split=split_info,
                           hyperparameters={"variance_floor": cfg["variance_floor"], "scaling": cfg["scaling"]})
            sw_svm, sw_nb = metrics(cm_svm.swapped()), metrics(cm_nb.swapped())

        def brief(m: MetricsReport) -> dict:
            return {"recall": m.recall, "precision": m.precision, "f1": m.f1, "accuracy": m.accuracy,
                    "confusion": asdict(m.confusion), "warnings": list(m.warnings)}

        entries.append({
            "id": dataset_id,
            "rows": run.rows,
            "train_count": len(run.train),
            "test_count": len(run.test),
            "split": split_info,
            "hyperparameters": hyper,
            "svm_converged": run.svm_converged,
            "svm_epochs": run.svm_epochs,
            "models": {"svm_er": m_svm.to_dict(), "naive": m_nb.to_dict()},
            "class_swapped": {"svm_er": brief(sw_svm), "naive": brief(sw_nb)},
            "delta": {k: getattr(m_svm, k) - getattr(m_nb, k) for k in ("recall", "precision", "f1", "accuracy")},
            "paper": PAPER_REFERENCE.get(dataset_id),
        })
        timing[dataset_id] = {**run.timing, "svm_er_predict_s": timing_pred}

    return {
        "schema_version": REPORT_VERSION,
        "config_hash": config_hash(cfg),
        "config": cfg,
        "datasets": entries,
        "timing": timing,
    }


def report_json(report: Mapping, include_timing: bool = True) -> str:
    body = dict(report)
    if not include_timing:
        body.pop("timing", None)
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def format_table1(report: Mapping) -> str:
    """Plain-text table in the benchmark's row layout, measured next to printed values."""
    head = f"{'Dataset':7s} {'Model':14s} {'Train':>5s} {'Test':>5s} {'Recall':>8s} {'Precision':>9s} " \
           f"{'Paper R':>8s} {'Paper P':>8s} {'Accuracy':>8s}"
    lines = [head, "-" * len(head)]
    for e in report["datasets"]:
        for key, label in (("svm_er", "SVM-ER"), ("naive", "Naive (GNB)")):
            m = e["models"][key]
            ref = (e.get("paper") or {}).get(key, {})
            pr = f"{ref['recall']:.2%}" if ref else "-"
            pp = f"{ref['precision']:.2%}" if ref else "-"
            lines.append(
                f"{e['id'].upper():7s} {label:14s} {e['train_count']:5d} {e['test_count']:5d} "
                f"{m['recall']:8.2%} {m['precision']:9.2%} {pr:>8s} {pp:>8s} {m['accuracy']:8.2%}"
            )
    lines.append(f"config {report['config_hash'][:16]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# overhead harness


@dataclass(frozen=True)
class BenchmarkRecord:
    method: str
    iteration: int
    cum_time_ns: int
    cum_kernel_evals: int


def run_overhead(config: Mapping | None = None) -> list[BenchmarkRecord]:
    """Cumulative cost of assessing test rows one per iteration.

    Config keys (on top of the experiment config): ``dataset`` (default
    ``"hdds"``), ``iterations`` (default 100) and ``naive`` which is either
    ``"gnb"`` (Gaussian NB prediction) or ``"combination"`` (the same
    decision values fused by pairwise enumeration instead of the
    analytical rule). Iteration ``t`` handles test row ``(t - 1) mod n``.
    """
    cfg = dict(config or {})
    dataset_id = cfg.pop("dataset", "hdds")
    T = int(cfg.pop("iterations", 100))
    naive = cfg.pop("naive", "gnb")
    if T < 1:
        raise EvaluationError("iterations must be at least 1")
    if naive not in ("gnb", "combination"):
        raise EvaluationError(f"naive must be 'gnb' or 'combination', got {naive!r}")

    run = prepare_run(dataset_id, cfg)
    pipe = run.pipeline
    X = run.test.features
    n = X.shape[0]
    per_row = pipe.kernel_evals_per_sample
    records: list[BenchmarkRecord] = []

    cum_ns = cum_k = 0
    for t in range(1, T + 1):
        row = X[(t - 1) % n]
        start = time.perf_counter_ns()
        pipe.assess_row(row)
        cum_ns += time.perf_counter_ns() - start
        cum_k += per_row
        records.append(BenchmarkRecord("er", t, cum_ns, cum_k))

    cum_ns = cum_k = 0
    bm, grades = pipe.belief_mapping, pipe.grades
    for t in range(1, T + 1):
        row = X[(t - 1) % n]
        start = time.perf_counter_ns()
        if naive == "gnb":
            nb_predict_many(run.nb_model, pipe.scaling.transform(row))
        else:
            values = pipe._decision_matrix(row)[0]
            masses = [
                er.assign_masses(er.AssessmentIndex(ix.id, ix.weight, map_decision_to_beliefs(float(v), bm)))
                for ix, v in zip(pipe.indexes, values)
            ]
            fused = er.combine_pairwise(masses)
            er.final_beliefs(fused)
            cum_k += per_row
        cum_ns += time.perf_counter_ns() - start
        records.append(BenchmarkRecord("naive", t, cum_ns, cum_k))
    return records


def overhead_csv(records: Sequence[BenchmarkRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "iteration", "cum_time_ns", "cum_kernel_evals"])
    for r in records:
        w.writerow([r.method, r.iteration, r.cum_time_ns, r.cum_kernel_evals])
    return buf.getvalue()
