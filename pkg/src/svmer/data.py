"""Dataset loading, feature scaling and seeded train/test splitting.

Datasets are held as dense float arrays with labels in {-1, +1}. Every
container here is immutable once built: the backing arrays are flagged
read-only so a loaded dataset can be shared freely.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

SCHEMA_DIR = Path(__file__).parent / "schemas"
DATASET_IDS = ("hdds", "bcds", "ids")


class DataError(ValueError):
    """Raised for malformed input files, schemas or split requests."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Sample:
    features: tuple[float, ...]
    label: int

    def __post_init__(self):
        if self.label not in (-1, 1):
            raise DataError(f"label must be -1 or +1, got {self.label!r}")
        if not all(np.isfinite(self.features)):
            raise DataError("sample features must be finite")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Labeled feature matrix.

    Parameters
    ----------
    features : array of shape (m, n)
    labels : array of shape (m,) with values in {-1, +1}
    name : identifier carried into reports
    """

    features: np.ndarray
    labels: np.ndarray
    name: str = "dataset"
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if X.size else X.reshape(0, 0)
        y = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if X.ndim != 2:
            raise DataError("features must be a 2-D array")
        if X.shape[0] != y.shape[0]:
            raise DataError(
                f"{X.shape[0]} feature rows but {y.shape[0]} labels"
            )
        if y.size and not np.isin(y, (-1, 1)).all():
            raise DataError("labels must be -1 or +1")
        if not np.isfinite(X).all():
            raise DataError("features must be finite")
        if self.feature_names is not None and len(self.feature_names) != X.shape[1]:
            raise DataError("feature_names length does not match feature count")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y))

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    @property
    def samples(self) -> tuple[Sample, ...]:
        return tuple(
            Sample(tuple(float(v) for v in row), int(lab))
            for row, lab in zip(self.features, self.labels)
        )

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def subset(self, indices: Sequence[int], name: str | None = None) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.features[idx].reshape(len(idx), self.feature_count),
            self.labels[idx],
            name=name or self.name,
            feature_names=self.feature_names,
        )

    def select_features(self, columns: Sequence[int]) -> "Dataset":
        cols = list(columns)
        names = None
        if self.feature_names is not None:
            names = tuple(self.feature_names[c] for c in cols)
        return Dataset(self.features[:, cols], self.labels, self.name, names)

    def has_both_classes(self) -> bool:
        return bool((self.labels == 1).any() and (self.labels == -1).any())

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], name: str = "dataset") -> "Dataset":
        if not samples:
            raise DataError("no samples given")
        n = len(samples[0].features)
        if any(len(s.features) != n for s in samples):
            raise DataError("samples disagree on feature count")
        return cls(
            np.array([s.features for s in samples], dtype=float),
            np.array([s.label for s in samples]),
            name=name,
        )


# ---------------------------------------------------------------------------
# CSV loading


@dataclass(frozen=True)
class CsvSchema:
    """Column layout of a delimited dataset file.

    ``label_column`` may be a zero-based index or a header name. Every raw
    label value that may appear must be listed in ``label_map``.
    """

    label_column: int | str
    label_map: Mapping[str, int]
    header: bool = False
    drop_columns: tuple[int | str, ...] = ()
    missing_token: str = "?"
    missing_policy: str = "drop"
    delimiter: str = ","
    name: str | None = None

    def __post_init__(self):
        if self.missing_policy not in ("drop", "impute_mean"):
            raise DataError(
                f"missing_policy must be 'drop' or 'impute_mean', got {self.missing_policy!r}"
            )
        bad = {k: v for k, v in self.label_map.items() if v not in (-1, 1)}
        if bad:
            raise DataError(f"label_map values must be -1 or +1: {bad}")
        if not isinstance(self.label_column, str) and not self.header and self.label_column < 0:
            raise DataError("label_column index must be non-negative")
        object.__setattr__(self, "label_map", dict(self.label_map))
        object.__setattr__(self, "drop_columns", tuple(self.drop_columns))

    @classmethod
    def from_dict(cls, d: Mapping) -> "CsvSchema":
        known = {
            "label_column", "label_map", "header", "drop_columns",
            "missing_token", "missing_policy", "delimiter", "name",
        }
        unknown = set(d) - known - {"description"}
        if unknown:
            raise DataError(f"unknown schema keys: {sorted(unknown)}")
        if "label_column" not in d or "label_map" not in d:
            raise DataError("schema needs 'label_column' and 'label_map'")
        return cls(
            label_column=d["label_column"],
            label_map={str(k): int(v) for k, v in d["label_map"].items()},
            header=bool(d.get("header", False)),
            drop_columns=tuple(d.get("drop_columns", ())),
            missing_token=d.get("missing_token", "?"),
            missing_policy=d.get("missing_policy", "drop"),
            delimiter=d.get("delimiter", ","),
            name=d.get("name"),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "CsvSchema":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "label_column": self.label_column,
            "label_map": dict(self.label_map),
            "header": self.header,
            "drop_columns": list(self.drop_columns),
            "missing_token": self.missing_token,
            "missing_policy": self.missing_policy,
            "delimiter": self.delimiter,
        }


def builtin_schema(dataset_id: str) -> CsvSchema:
    """Schema for one of the bundled benchmark layouts ("hdds", "bcds", "ids")."""
    if dataset_id not in DATASET_IDS:
        raise DataError(f"unknown dataset id {dataset_id!r}; expected one of {DATASET_IDS}")
    return CsvSchema.from_json(SCHEMA_DIR / f"{dataset_id}.json")


def _resolve_column(col: int | str, header: list[str] | None, arity: int) -> int:
    if isinstance(col, str):
        if header is None:
            raise DataError(f"column {col!r} named but file has no header")
        if col not in header:
            raise DataError(f"column {col!r} not in header {header}")
        return header.index(col)
    idx = col if col >= 0 else arity + col
    if not 0 <= idx < arity:
        raise DataError(f"column index {col} out of range for {arity} columns")
    return idx


def load_csv(path: str | Path, schema: CsvSchema, name: str | None = None) -> Dataset:
    """Read a delimited file into a :class:`Dataset`, preserving row order.

    Rows with the wrong number of fields, unparseable numbers or label
    values missing from the schema raise :class:`DataError` naming the
    (zero-based, data-row) index. Missing cells are handled per
    ``schema.missing_policy``.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh, delimiter=schema.delimiter) if r and any(c.strip() for c in r)]
    header = None
    if schema.header:
        if not rows:
            raise DataError(f"{path}: empty file")
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")

    arity = len(header) if header is not None else len(rows[0])
    label_col = _resolve_column(schema.label_column, header, arity)
    dropped = {_resolve_column(c, header, arity) for c in schema.drop_columns}
    feature_cols = [c for c in range(arity) if c != label_col and c not in dropped]

    values = np.empty((len(rows), len(feature_cols)))
    labels = np.empty(len(rows), dtype=np.int64)
    missing = np.zeros((len(rows), len(feature_cols)), dtype=bool)
    for i, row in enumerate(rows):
        if len(row) != arity:
            raise DataError(f"{path}: row {i} has {len(row)} fields, expected {arity}")
        raw_label = row[label_col].strip()
        if raw_label not in schema.label_map:
            raise DataError(f"{path}: row {i} has unknown label value {raw_label!r}")
        labels[i] = schema.label_map[raw_label]
        for j, c in enumerate(feature_cols):
            cell = row[c].strip()
            if cell == schema.missing_token or cell == "":
                missing[i, j] = True
                values[i, j] = np.nan
                continue
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {i} column {c} is not a number: {cell!r}"
                ) from None
            if not np.isfinite(values[i, j]):
                raise DataError(f"{path}: row {i} column {c} is not finite: {cell!r}")

    if missing.any():
        if schema.missing_policy == "drop":
            keep = ~missing.any(axis=1)
            values, labels = values[keep], labels[keep]
        else:
            col_means = np.nanmean(values, axis=0)
            if np.isnan(col_means).any():
                raise DataError(f"{path}: a column has no observed values to impute from")
            values = np.where(missing, col_means[None, :], values)
        if len(labels) == 0:
            raise DataError(f"{path}: every row had missing values")

    names = tuple(header[c] for c in feature_cols) if header is not None else None
    return Dataset(values, labels, name=name or schema.name or path.stem, feature_names=names)


# ---------------------------------------------------------------------------
# scaling


@dataclass(frozen=True, eq=False)
class ScalingParams:
    mode: str
    location: np.ndarray
    spread: np.ndarray

    def __post_init__(self):
        if self.mode not in ("minmax", "zscore"):
            raise DataError(f"scaling mode must be 'minmax' or 'zscore', got {self.mode!r}")
        loc = np.asarray(self.location, dtype=float).reshape(-1)
        spr = np.asarray(self.spread, dtype=float).reshape(-1)
        if loc.shape != spr.shape:
            raise DataError("location and spread lengths differ")
        if (spr <= 0).any():
            raise DataError("every spread must be positive")
        object.__setattr__(self, "location", _frozen(loc))
        object.__setattr__(self, "spread", _frozen(spr))

    @property
    def feature_count(self) -> int:
        return self.location.shape[0]

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.feature_count:
            raise DataError(
                f"expected {self.feature_count} features, got {X.shape[-1]}"
            )
        return (X - self.location) / self.spread

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "location": self.location.tolist(),
            "spread": self.spread.tolist(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ScalingParams":
        return cls(d["mode"], np.array(d["location"], dtype=float), np.array(d["spread"], dtype=float))


def fit_scaling(ds: Dataset, mode: str = "minmax") -> ScalingParams:
    """Fit per-feature location/spread on ``ds``.

    Constant columns get spread 1 with location equal to the constant,
    so they scale to exactly 0.
    """
    if len(ds) == 0:
        raise DataError("cannot fit scaling on an empty dataset")
    X = ds.features
    if mode == "minmax":
        loc = X.min(axis=0)
        spread = X.max(axis=0) - loc
    elif mode == "zscore":
        loc = X.mean(axis=0)
        spread = X.std(axis=0)
    else:
        raise DataError(f"scaling mode must be 'minmax' or 'zscore', got {mode!r}")
    constant = ~(spread > 0)
    spread = np.where(constant, 1.0, spread)
    # exact zero for constant columns, whatever mean() rounding did
    loc = np.where(constant, X[0], loc)
    return ScalingParams(mode, loc, spread)


def apply_scaling(ds: Dataset, p: ScalingParams) -> Dataset:
    if ds.feature_count != p.feature_count:
        raise DataError(
            f"dataset has {ds.feature_count} features, scaling expects {p.feature_count}"
        )
    return Dataset(p.transform(ds.features), ds.labels, ds.name, ds.feature_names)


# ---------------------------------------------------------------------------
# splitting


@dataclass(frozen=True)
class SplitSpec:
    train_count: int
    test_count: int
    seed: int = 42
    stratified: bool = True

    def __post_init__(self):
        if self.train_count < 1:
            raise DataError("train_count must be positive")
        if self.test_count < 0:
            raise DataError("test_count must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must be a 64-bit unsigned integer")


def _largest_remainder(total: int, weights: np.ndarray) -> np.ndarray:
    exact = total * weights / weights.sum()
    base = np.floor(exact).astype(np.int64)
    short = total - base.sum()
    # stable ordering keeps ties deterministic
    order = np.argsort(-(exact - base), kind="stable")
    base[order[:short]] += 1
    return base


def split_indices(labels: np.ndarray, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Index partition behind :func:`split`."""
    labels = np.asarray(labels)
    m = labels.shape[0]
    need = spec.train_count + spec.test_count
    if need > m:
        raise DataError(f"split asks for {need} samples but dataset has {m}")
    rng = np.random.default_rng(spec.seed)
    if not spec.stratified:
        perm = rng.permutation(m)
        return perm[: spec.train_count], perm[spec.train_count : need]

    classes = np.array([-1, 1])
    pools = [rng.permutation(np.flatnonzero(labels == c)) for c in classes]
    sizes = np.array([len(p) for p in pools], dtype=float)
    used = _largest_remainder(need, sizes)
    n_train = _largest_remainder(spec.train_count, sizes)
    n_train = np.minimum(n_train, used)
    # re-balance if the cap moved samples out of the train quota
    deficit = spec.train_count - n_train.sum()
    for k in np.argsort(-(used - n_train), kind="stable"):
        take = min(deficit, used[k] - n_train[k])
        n_train[k] += take
        deficit -= take
    train = np.concatenate([p[: n_train[k]] for k, p in enumerate(pools)])
    test = np.concatenate([p[n_train[k] : used[k]] for k, p in enumerate(pools)])
    return rng.permutation(train), rng.permutation(test)


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded shuffle-and-prefix split, stratified by label by default."""
    train_idx, test_idx = split_indices(ds.labels, spec)
    return (
        ds.subset(train_idx, name=f"{ds.name}[train]"),
        ds.subset(test_idx, name=f"{ds.name}[test]"),
    )


def load_dataset(dataset_id: str, path: str | Path) -> Dataset:
    """Load one of the benchmark files with its built-in schema."""
    return load_csv(path, builtin_schema(dataset_id), name=dataset_id)
