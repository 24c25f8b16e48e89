"""Biasless kernel SVM trained by clipped per-sample dual updates.

Training sweeps the samples in index order and, for each ``j``, takes the
kernel-adatron step

    pi_j <- pi_j + eta * (1 - b_j * sum_i pi_i * b_i * G[i, j])

then clips ``pi_j`` into ``[0, D]``. Epochs repeat until the largest
absolute change within one full sweep is at most ``tolerance`` or
``max_epochs`` is reached. The decision function is the dual expansion

    f(a) = sum_j pi_j * b_j * K(a_j, a) + bias

with ``bias`` fixed at 0 unless ``TrainConfig.fit_bias`` is set.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .data import Dataset, ScalingParams
from .kernels import GramMatrix, KernelSpec, gram_matrix, kernel_matrix

MODEL_VERSION = 1


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for :func:`train`.

    ``seed`` is recorded with the model and seeds any split made before
    training; the sweep order is the fixed sample order, so training
    itself draws no random numbers.
    """

    penalty: float = 1.0
    learning_rate: float = 1.0
    tolerance: float = 1e-6
    max_epochs: int = 1000
    seed: int = 42
    fit_bias: bool = False

    def __post_init__(self):
        for name in ("penalty", "learning_rate", "tolerance"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise TrainingError(f"{name} must be a positive finite number, got {value!r}")
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 1:
            raise TrainingError(f"max_epochs must be a positive integer, got {self.max_epochs!r}")
        if not 0 <= self.seed < 2**64:
            raise TrainingError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {
            "penalty": self.penalty,
            "learning_rate": self.learning_rate,
            "tolerance": self.tolerance,
            "max_epochs": self.max_epochs,
            "seed": self.seed,
            "fit_bias": self.fit_bias,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TrainConfig":
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise TrainingError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    max_update: float
    n_clipped: int
    elapsed_s: float
    min_weight: float
    max_weight: float


@dataclass
class TrainTrace:
    records: list[EpochRecord] = field(default_factory=list)
    converged: bool = False

    @property
    def epochs(self) -> int:
        return len(self.records)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "max_update", "n_clipped", "elapsed_s", "min_weight", "max_weight"])
        for r in self.records:
            w.writerow([r.epoch, repr(r.max_update), r.n_clipped, f"{r.elapsed_s:.6f}",
                        repr(r.min_weight), repr(r.max_weight)])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class SvmModel:
    dual_weights: np.ndarray
    labels: np.ndarray
    support_samples: np.ndarray
    kernel: KernelSpec
    penalty: float
    bias: float = 0.0
    scaling: ScalingParams | None = None

    def __post_init__(self):
        w = np.array(self.dual_weights, dtype=float).reshape(-1)
        y = np.array(self.labels, dtype=np.int64).reshape(-1)
        X = np.array(self.support_samples, dtype=float)
        if X.ndim == 1:
            X = X.reshape(len(w), -1)
        if not (w.shape[0] == y.shape[0] == X.shape[0]):
            raise TrainingError("dual_weights, labels and support_samples disagree in length")
        if (w < 0).any() or (w > self.penalty).any():
            raise TrainingError("dual weights must lie in [0, penalty]")
        for arr in (w, y, X):
            arr.flags.writeable = False
        object.__setattr__(self, "dual_weights", w)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "support_samples", X)
        active = np.flatnonzero(w > 0)
        object.__setattr__(self, "_active", active)
        object.__setattr__(self, "_coef", w[active] * y[active])

    @property
    def feature_count(self) -> int:
        return self.support_samples.shape[1]

    @property
    def support_indices(self) -> np.ndarray:
        return self._active

    @property
    def n_support(self) -> int:
        return int(self._active.size)

    def to_dict(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "kind": "svm",
            "kernel": self.kernel.to_dict(),
            "penalty": self.penalty,
            "bias": self.bias,
            "dual_weights": self.dual_weights.tolist(),
            "labels": self.labels.tolist(),
            "support_samples": self.support_samples.tolist(),
            "scaling_params": None if self.scaling is None else self.scaling.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SvmModel":
        if d.get("kind", "svm") != "svm":
            raise TrainingError(f"not an SVM model document: kind={d.get('kind')!r}")
        if d.get("version") != MODEL_VERSION:
            raise TrainingError(f"unsupported model version {d.get('version')!r}")
        scaling = d.get("scaling_params")
        n = len(d["dual_weights"])
        return cls(
            dual_weights=np.array(d["dual_weights"], dtype=float),
            labels=np.array(d["labels"], dtype=np.int64),
            support_samples=np.array(d["support_samples"], dtype=float).reshape(n, -1),
            kernel=KernelSpec.from_dict(d["kernel"]),
            penalty=float(d["penalty"]),
            bias=float(d.get("bias", 0.0)),
            scaling=None if scaling is None else ScalingParams.from_dict(scaling),
        )


def train(
    train_set: Dataset,
    k: KernelSpec,
    cfg: TrainConfig = TrainConfig(),
    gram: GramMatrix | None = None,
) -> tuple[SvmModel, TrainTrace]:
    """Fit dual weights by repeated clipped sweeps over the training set.

    Returns the model and a per-epoch trace; ``trace.converged`` tells
    whether the tolerance was met before ``max_epochs``.
    """
    if not train_set.has_both_classes():
        raise TrainingError("training set must contain both classes")
    G = (gram if gram is not None else gram_matrix(k, train_set)).entries
    if G.shape[0] != len(train_set):
        raise TrainingError("Gram matrix size does not match the training set")
    if not np.isfinite(G).all():
        raise TrainingError("Gram matrix has non-finite entries")

    b = train_set.labels.astype(float)
    m = b.shape[0]
    D, eta = cfg.penalty, cfg.learning_rate
    pi = np.zeros(m)
    signed = np.zeros(m)  # pi * b, kept in step with pi
    trace = TrainTrace()
    start = time.perf_counter()

    for epoch in range(1, cfg.max_epochs + 1):
        max_update = 0.0
        n_clipped = 0
        for j in range(m):
            candidate = pi[j] + eta * (1.0 - b[j] * (G[j] @ signed))
            if candidate > D:
                new, n_clipped = D, n_clipped + 1
            elif candidate < 0.0:
                new, n_clipped = 0.0, n_clipped + 1
            else:
                new = candidate
            if not np.isfinite(candidate):
                raise TrainingError(f"non-finite weight update in epoch {epoch} at sample {j}")
            step = abs(new - pi[j])
            if step > max_update:
                max_update = step
            pi[j] = new
            signed[j] = new * b[j]
        trace.records.append(
            EpochRecord(epoch, float(max_update), n_clipped, time.perf_counter() - start,
                        float(pi.min()), float(pi.max()))
        )
        if max_update <= cfg.tolerance:
            trace.converged = True
            break

    if not (pi > 0).any():
        raise TrainingError("training ended with every dual weight at zero")

    bias = 0.0
    if cfg.fit_bias:
        bias = _sweep_bias(G @ signed, train_set.labels)
    model = SvmModel(pi, train_set.labels, train_set.features, k, D, bias)
    return model, trace


def _sweep_bias(scores: np.ndarray, labels: np.ndarray) -> float:
    """Offset maximizing training accuracy over midpoints of sorted scores.

    Ties go to the offset closest to zero.
    """
    s = np.sort(scores)
    thresholds = np.concatenate([[0.0, s[0] - 1.0, s[-1] + 1.0], (s[1:] + s[:-1]) / 2])
    best_acc, best_bias = -1, 0.0
    for t in thresholds:
        pred = np.where(scores - t >= 0, 1, -1)
        acc = int((pred == labels).sum())
        if acc > best_acc or (acc == best_acc and abs(t) < abs(best_bias)):
            best_acc, best_bias = acc, -float(t)
    return best_bias


def _check_arity(model: SvmModel, X: np.ndarray) -> None:
    if X.shape[-1] != model.feature_count:
        raise TrainingError(
            f"expected {model.feature_count} features, got {X.shape[-1]}"
        )


def decision_values(model: SvmModel, X) -> np.ndarray:
    """Vectorized :func:`decision_value` over the rows of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    _check_arity(model, X)
    if model.n_support == 0:
        return np.full(X.shape[0], model.bias)
    K = kernel_matrix(model.kernel, X, model.support_samples[model.support_indices])
    return K @ model._coef + model.bias


def decision_value(model: SvmModel, a: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float).reshape(-1)
    _check_arity(model, a)
    value = float(decision_values(model, a)[0])
    if not np.isfinite(value):
        raise TrainingError("decision value is not finite")
    return value


def label_from_value(value: float) -> int:
    # exact zero goes to +1
    return 1 if value >= 0 else -1


def predict(model: SvmModel, a: Sequence[float]) -> int:
    return label_from_value(decision_value(model, a))


def predict_many(model: SvmModel, X) -> np.ndarray:
    return np.where(decision_values(model, X) >= 0, 1, -1)


def weight_norm_sq(model: SvmModel) -> float:
    """Squared norm of the implicit hyperplane normal, sum_ij pi_i pi_j b_i b_j G_ij."""
    S = model.support_samples[model.support_indices]
    K = kernel_matrix(model.kernel, S, S)
    return float(model._coef @ K @ model._coef)


def geometric_margin(model: SvmModel) -> float:
    """Distance ``2 / ||v||`` between the two margin hyperplanes."""
    if model.n_support == 0:
        raise TrainingError("margin is undefined when every dual weight is zero")
    norm_sq = weight_norm_sq(model)
    if norm_sq <= 0:
        raise TrainingError(f"hyperplane normal has non-positive squared norm {norm_sq!r}")
    return 2.0 / float(np.sqrt(norm_sq))
