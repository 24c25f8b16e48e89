"""Gaussian Naive Bayes baseline for binary {-1, +1} labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .data import Dataset, ScalingParams

MODEL_VERSION = 1
CLASSES = (-1, 1)


class NaiveBayesError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GaussianNbModel:
    """Per-class priors, feature means and floored variances.

    Row 0 of ``means``/``variances`` belongs to class -1, row 1 to +1.
    """

    priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    variance_floor: float = 1e-9
    scaling: ScalingParams | None = None

    def __post_init__(self):
        priors = np.array(self.priors, dtype=float).reshape(2)
        means = np.array(self.means, dtype=float).reshape(2, -1)
        variances = np.array(self.variances, dtype=float).reshape(2, -1)
        if not self.variance_floor > 0:
            raise NaiveBayesError("variance_floor must be positive")
        if not ((priors > 0) & (priors < 1)).all() or abs(priors.sum() - 1) > 1e-12:
            raise NaiveBayesError(f"priors must lie in (0, 1) and sum to 1, got {priors}")
        if (variances < self.variance_floor).any():
            raise NaiveBayesError("stored variances must be at least variance_floor")
        for arr in (priors, means, variances):
            arr.flags.writeable = False
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)

    @property
    def feature_count(self) -> int:
        return self.means.shape[1]

    def to_dict(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "kind": "gaussian_nb",
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "variance_floor": self.variance_floor,
            "scaling_params": None if self.scaling is None else self.scaling.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "GaussianNbModel":
        if d.get("kind") != "gaussian_nb":
            raise NaiveBayesError(f"not a Gaussian NB document: kind={d.get('kind')!r}")
        if d.get("version") != MODEL_VERSION:
            raise NaiveBayesError(f"unsupported model version {d.get('version')!r}")
        scaling = d.get("scaling_params")
        return cls(
            np.array(d["priors"]),
            np.array(d["means"]),
            np.array(d["variances"]),
            float(d["variance_floor"]),
            None if scaling is None else ScalingParams.from_dict(scaling),
        )


def nb_fit(train_set: Dataset, variance_floor: float = 1e-9) -> GaussianNbModel:
    """Class frequencies as priors, per-class sample means and floored variances."""
    if not train_set.has_both_classes():
        raise NaiveBayesError("training set must contain both classes")
    X, y = train_set.features, train_set.labels
    priors, means, variances = [], [], []
    for c in CLASSES:
        Xc = X[y == c]
        priors.append(Xc.shape[0] / X.shape[0])
        means.append(Xc.mean(axis=0))
        variances.append(np.maximum(Xc.var(axis=0), variance_floor))
    return GaussianNbModel(np.array(priors), np.array(means), np.array(variances), variance_floor)


def log_posteriors(model: GaussianNbModel, X) -> np.ndarray:
    """Unnormalized log posteriors, shape (n_samples, 2), columns ordered (-1, +1)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.feature_count:
        raise NaiveBayesError(f"expected {model.feature_count} features, got {X.shape[1]}")
    out = np.empty((X.shape[0], 2))
    for k in range(2):
        mu, var = model.means[k], model.variances[k]
        ll = -0.5 * (np.log(2 * np.pi * var) + (X - mu) ** 2 / var)
        out[:, k] = np.log(model.priors[k]) + ll.sum(axis=1)
    return out


def nb_predict_many(model: GaussianNbModel, X) -> np.ndarray:
    lp = log_posteriors(model, X)
    # tie goes to +1
    return np.where(lp[:, 1] >= lp[:, 0], 1, -1)


def nb_predict(model: GaussianNbModel, a: Sequence[float]) -> int:
    a = np.asarray(a, dtype=float).reshape(-1)
    return int(nb_predict_many(model, a)[0])


def nb_decision_values(model: GaussianNbModel, X) -> np.ndarray:
    """Log posterior odds of +1 over -1; positive means +1 is predicted."""
    lp = log_posteriors(model, X)
    return lp[:, 1] - lp[:, 0]
