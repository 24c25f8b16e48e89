"""Command-line entry point.

Exit codes: 0 success, 2 configuration or usage error, 3 training stopped
at max_epochs without converging (model still written), 4 I/O failure.

Settings resolve as built-in defaults < ``--config`` JSON file < flags.
``--print-config`` prints the resolved settings and exits.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__, er
from .assess import AssessError, BeliefMapping, IndexInput, assess, config_hash
from .data import (
    DATASET_IDS, CsvSchema, DataError, SplitSpec, apply_scaling, builtin_schema, fit_scaling,
    load_csv, split,
)
from .evaluation import (
    DatasetMissing, EvaluationError, confusion, format_table1, merge_config, metrics,
    overhead_csv, report_json, resolve_experiment, run_overhead, run_table1,
)
from .kernels import KINDS, KernelError, KernelSpec
from .models import dump_model, load_model, raw_decision_values
from .naive_bayes import NaiveBayesError, nb_fit
from .svm import TrainConfig, TrainingError, train

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_IO = 0, 2, 3, 4

TRAIN_DEFAULTS = {
    "dataset": None,
    "dataset_id": None,
    "schema": None,
    "model": "svm",
    "kernel": {"kind": "rbf", "gamma": 0.5},
    "train_config": TrainConfig().to_dict(),
    "scaling": "minmax",
    "variance_floor": 1e-9,
    "split": None,
    "out": "model.json",
    "trace": None,
}

ASSESS_DEFAULTS = {
    "model": None,
    "spec": None,
    "input": None,
    "header": False,
    "belief_mapping": BeliefMapping().to_dict(),
    "out": None,
}


class ConfigError(ValueError):
    pass


def _read_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return doc


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _emit_config(resolved: Mapping) -> int:
    print(json.dumps(resolved, indent=2, sort_keys=True))
    return EXIT_OK


def _read_rows(path: str, header: bool) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if header:
        rows = rows[1:]
    try:
        X = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError(f"{path}: expected a non-empty table of numbers")
    return X


# ---------------------------------------------------------------------------
# train


def _train_flags(args) -> dict:
    flags: dict = {}
    for key in ("dataset", "dataset_id", "schema", "scaling", "variance_floor", "out", "trace"):
        if getattr(args, key) is not None:
            flags[key] = getattr(args, key)
    if args.model_kind is not None:
        flags["model"] = args.model_kind
    kernel = {}
    if args.kernel is not None:
        kernel["kind"] = args.kernel
    for flag, key in (("gamma", "gamma"), ("pi", "pi"), ("r", "r"), ("degree", "d")):
        if getattr(args, flag) is not None:
            kernel[key] = getattr(args, flag)
    if kernel:
        flags["kernel"] = kernel
    tc = {}
    for flag, key in (("penalty", "penalty"), ("eta", "learning_rate"), ("tol", "tolerance"),
                      ("max_epochs", "max_epochs"), ("seed", "seed")):
        if getattr(args, flag) is not None:
            tc[key] = getattr(args, flag)
    if args.fit_bias:
        tc["fit_bias"] = True
    if tc:
        flags["train_config"] = tc
    if args.split is not None:
        try:
            n_train, n_test = (int(x) for x in args.split.split(","))
        except ValueError:
            raise ConfigError("--split takes TRAIN,TEST counts") from None
        flags["split"] = {"train": n_train, "test": n_test}
    return flags


def _resolve_kernel(base: Mapping, override: Mapping) -> dict:
    # a new kind drops the parameters of the old one
    if "kind" in override and override["kind"] != base.get("kind"):
        return dict(override)
    return {**base, **override}


def cmd_train(args) -> int:
    file_cfg = _read_config(args.config)
    flags = _train_flags(args)
    resolved = merge_config(TRAIN_DEFAULTS, {k: v for k, v in file_cfg.items() if k != "kernel"})
    resolved["kernel"] = _resolve_kernel(TRAIN_DEFAULTS["kernel"], file_cfg.get("kernel", {}))
    resolved = merge_config(resolved, {k: v for k, v in flags.items() if k != "kernel"})
    resolved["kernel"] = _resolve_kernel(resolved["kernel"], flags.get("kernel", {}))
    resolved = {"command": "train", **resolved}
    if args.print_config:
        return _emit_config(resolved)

    if resolved["model"] not in ("svm", "nb"):
        raise ConfigError(f"--model-kind must be 'svm' or 'nb', got {resolved['model']!r}")
    if resolved["dataset"] is None:
        raise ConfigError("--dataset is required")
    if resolved["schema"] is not None:
        schema = CsvSchema.from_json(resolved["schema"])
    elif resolved["dataset_id"] is not None:
        schema = builtin_schema(resolved["dataset_id"])
    else:
        raise ConfigError(f"give --schema or --dataset-id (one of {', '.join(DATASET_IDS)})")
    kernel = KernelSpec.from_dict(resolved["kernel"])
    tc = TrainConfig.from_dict(resolved["train_config"])

    ds = load_csv(resolved["dataset"], schema)
    test_set = None
    if resolved["split"]:
        s = resolved["split"]
        ds, test_set = split(ds, SplitSpec(int(s["train"]), int(s["test"]), tc.seed))
    scaling = fit_scaling(ds, resolved["scaling"])
    scaled = apply_scaling(ds, scaling)
    provenance = {"config_hash": config_hash(resolved), "config": resolved}

    converged = True
    if resolved["model"] == "svm":
        model, trace = train(scaled, kernel, tc)
        model = dataclasses.replace(model, scaling=scaling)
        converged = trace.converged
        trace_path = resolved["trace"] or str(Path(resolved["out"]).with_suffix(".trace.csv"))
        Path(trace_path).write_text(trace.to_csv(), encoding="utf-8")
        print(f"trained SVM: {trace.epochs} epochs, converged={trace.converged}, "
              f"{model.n_support} support vectors", file=sys.stderr)
    else:
        model = dataclasses.replace(nb_fit(scaled, float(resolved["variance_floor"])), scaling=scaling)
        print("trained Gaussian NB", file=sys.stderr)
    dump_model(model, resolved["out"], provenance)

    if test_set is not None:
        pred = np.where(raw_decision_values(model, test_set.features) >= 0, 1, -1)
        m = metrics(confusion(pred, test_set.labels))
        print(f"test: recall={m.recall:.4f} precision={m.precision:.4f} "
              f"f1={m.f1:.4f} accuracy={m.accuracy:.4f}", file=sys.stderr)
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


# ---------------------------------------------------------------------------
# predict


def cmd_predict(args) -> int:
    resolved = merge_config({"model": None, "input": None, "header": False, "out": None},
                            _read_config(args.config))
    for key in ("model", "input", "out"):
        if getattr(args, key) is not None:
            resolved[key] = getattr(args, key)
    if args.header:
        resolved["header"] = True
    resolved = {"command": "predict", **resolved}
    if args.print_config:
        return _emit_config(resolved)
    if not resolved["model"] or not resolved["input"]:
        raise ConfigError("--model and --input are required")
    model = load_model(resolved["model"])
    values = raw_decision_values(model, _read_rows(resolved["input"], resolved["header"]))
    lines = ["label,decision_value"] + [f"{1 if v >= 0 else -1},{v!r}" for v in values.tolist()]
    _write("\n".join(lines) + "\n", resolved["out"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# assess


def cmd_assess(args) -> int:
    resolved = merge_config(ASSESS_DEFAULTS, _read_config(args.config))
    for key in ("model", "spec", "input", "out"):
        if getattr(args, key) is not None:
            resolved[key] = getattr(args, key)
    if args.header:
        resolved["header"] = True
    if args.steepness is not None:
        resolved["belief_mapping"]["steepness"] = args.steepness
    resolved = {"command": "assess", **resolved}
    if args.print_config:
        return _emit_config(resolved)
    if not resolved["spec"]:
        raise ConfigError("--spec is required")

    with open(resolved["spec"], encoding="utf-8") as fh:
        spec_doc = json.load(fh)
    grades, entries = er.load_assessment_spec(spec_doc)
    if not entries:
        raise ConfigError("assessment spec lists no indexes")
    bm_cfg = merge_config(resolved["belief_mapping"], spec_doc.get("belief_mapping", {}))
    bm_cfg["grade_count"] = grades.size
    bm = BeliefMapping.from_dict(bm_cfg)

    models = {}
    for e in entries:
        if "beliefs" in e:
            continue
        path = e.get("model") or resolved["model"]
        if not path:
            raise ConfigError(f"index {e['id']!r} has no beliefs and no model was given")
        if path not in models:
            models[path] = load_model(path)

    if models:
        if not resolved["input"]:
            raise ConfigError("--input is required when an index is model-driven")
        X = _read_rows(resolved["input"], resolved["header"])
    else:
        X = np.zeros((1, 0))

    values: dict = {}
    for e in entries:
        if "beliefs" not in e:
            path = e.get("model") or resolved["model"]
            Xi = X if e.get("columns") is None else X[:, list(e["columns"])]
            values[e["id"]] = raw_decision_values(models[path], Xi)

    provenance = {"config_hash": config_hash(resolved), "spec": resolved["spec"],
                  "models": sorted(models)}
    out_lines = []
    for row in range(X.shape[0]):
        items = []
        for e in entries:
            if "beliefs" in e:
                items.append(IndexInput(e["id"], float(e["weight"]), beliefs=tuple(e["beliefs"])))
            else:
                items.append(IndexInput(e["id"], float(e["weight"]), decision_value=float(values[e["id"]][row])))
        ra = assess(items, bm, grades, provenance={**provenance, "row": row})
        out_lines.append(json.dumps(ra.to_dict(), sort_keys=True))
    _write("\n".join(out_lines) + "\n", resolved["out"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# table1 / overhead


def _experiment_from(args) -> dict:
    override = _read_config(args.config)
    if getattr(args, "data_dir", None) is not None:
        override["data_dir"] = args.data_dir
    if getattr(args, "seed", None) is not None:
        override["seed"] = args.seed
    return resolve_experiment(override)


def cmd_table1(args) -> int:
    cfg = _experiment_from(args)
    if args.print_config:
        return _emit_config({"command": "table1", **cfg})
    report = run_table1(cfg, args.datasets or None)
    _write(report_json(report, include_timing=not args.no_timing), args.out)
    table = format_table1(report)
    if args.table:
        Path(args.table).write_text(table, encoding="utf-8")
    if args.out not in (None, "-"):
        sys.stdout.write(table)
    return EXIT_OK


def cmd_overhead(args) -> int:
    cfg = _experiment_from(args)
    cfg["dataset"] = args.dataset
    cfg["iterations"] = args.iters
    cfg["naive"] = args.naive
    if args.print_config:
        return _emit_config({"command": "overhead", **cfg})
    records = run_overhead(cfg)
    _write(overhead_csv(records), args.out)
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"svmer {__version__}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="svmer", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--print-config", action="store_true", help="print the resolved config and exit")

    p = sub.add_parser("train", help="train an SVM or Gaussian NB model from a CSV file")
    common(p)
    p.add_argument("--dataset", help="CSV file to train on")
    p.add_argument("--schema", help="JSON column-layout file for --dataset")
    p.add_argument("--dataset-id", choices=DATASET_IDS, help="use a built-in benchmark schema")
    p.add_argument("--model-kind", choices=("svm", "nb"), help="model family (default svm)")
    p.add_argument("--kernel", help=f"kernel kind: {', '.join(KINDS)}")
    p.add_argument("--gamma", type=float, help="rbf width")
    p.add_argument("--pi", type=float, help="polynomial/sigmoid scale")
    p.add_argument("--r", type=float, help="polynomial/sigmoid offset")
    p.add_argument("--degree", type=int, help="polynomial degree")
    p.add_argument("--penalty", type=float, help="upper bound D on dual weights")
    p.add_argument("--eta", type=float, help="learning rate")
    p.add_argument("--tol", type=float, help="convergence tolerance on the largest weight change")
    p.add_argument("--max-epochs", type=int, help="hard stop on training sweeps")
    p.add_argument("--fit-bias", action="store_true", help="fit a post-hoc offset on training accuracy")
    p.add_argument("--seed", type=int, help="seed for --split")
    p.add_argument("--scaling", choices=("minmax", "zscore"))
    p.add_argument("--variance-floor", type=float, help="Gaussian NB variance floor")
    p.add_argument("--split", help="TRAIN,TEST counts; train on the first part, report on the second")
    p.add_argument("--out", help="model JSON path (default model.json)")
    p.add_argument("--trace", help="training trace CSV path (default <out>.trace.csv)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="labels and decision values for rows of features")
    common(p)
    p.add_argument("--model")
    p.add_argument("--input", help="CSV of unscaled feature rows")
    p.add_argument("--header", action="store_true", help="input has a header row")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("assess", help="graded risk assessment per input row (JSON lines)")
    common(p)
    p.add_argument("--model", help="model used by indexes without fixed beliefs")
    p.add_argument("--spec", help="assessment spec JSON: grades, indexes, fuzzy")
    p.add_argument("--input", help="CSV of unscaled feature rows")
    p.add_argument("--header", action="store_true", help="input has a header row")
    p.add_argument("--steepness", type=float, help="logistic belief mapping steepness")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("table1", help="SVM-ER vs naive baseline on the three benchmarks")
    common(p)
    p.add_argument("--data-dir", help="directory holding the benchmark files")
    p.add_argument("--seed", type=int)
    p.add_argument("--datasets", nargs="*", choices=DATASET_IDS)
    p.add_argument("--out", help="report JSON path (default stdout)")
    p.add_argument("--table", help="also write the formatted table here")
    p.add_argument("--no-timing", action="store_true", help="omit timing fields from the report")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("overhead", help="cumulative cost per iteration, ER vs naive")
    common(p)
    p.add_argument("--data-dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--dataset", default="hdds", choices=DATASET_IDS)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--naive", choices=("gnb", "combination"), default="gnb")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_overhead)

    p = sub.add_parser("version", help="print the package version")
    p.set_defaults(func=cmd_version)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except DatasetMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, KernelError, TrainingError, NaiveBayesError, DataError, AssessError,
            EvaluationError, er.ERError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
