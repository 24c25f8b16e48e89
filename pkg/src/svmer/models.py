"""JSON persistence for trained classifiers.

Both model kinds share one envelope: a ``version`` and a ``kind``
(``"svm"`` or ``"gaussian_nb"``) next to the model fields. Extra keys such
as ``provenance`` are carried through untouched.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

import numpy as np

from .naive_bayes import GaussianNbModel, nb_decision_values
from .svm import SvmModel, decision_values


def model_from_dict(d: Mapping):
    kind = d.get("kind")
    if kind == "svm":
        return SvmModel.from_dict(d)
    if kind == "gaussian_nb":
        return GaussianNbModel.from_dict(d)
    raise ValueError(f"unknown model kind {kind!r}")


def load_model(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def dump_model(model, path: str | Path, provenance: Mapping | None = None) -> None:
    doc = model.to_dict()
    if provenance is not None:
        doc["provenance"] = dict(provenance)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def raw_decision_values(model, X) -> np.ndarray:
    """Decision values for unscaled rows, applying the model's stored scaling."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if model.scaling is not None:
        X = model.scaling.transform(X)
    if isinstance(model, SvmModel):
        return decision_values(model, X)
    return nb_decision_values(model, X)
