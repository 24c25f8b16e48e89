"""From classifier outputs to a graded risk assessment.

Each assessment index is either a fixed belief vector or a classifier
decision value. Decision values become belief vectors through a
:class:`BeliefMapping`. The indexes are then fused with :mod:`svmer.er`
and the result is read out as a risk grade plus a utility interval.

By convention the positive SVM class (+1) supports the higher-risk grade.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.special import expit

from . import er
from .data import ScalingParams
from .svm import SvmModel, decision_values

SCHEMA_VERSION = 1
TIE_TOL = 1e-12


class AssessError(ValueError):
    pass


@dataclass(frozen=True)
class BeliefMapping:
    mode: str = "logistic"
    steepness: float = 1.0
    bin_edges: tuple[float, ...] = ()
    grade_count: int = 2
    invert: bool = False

    def __post_init__(self):
        object.__setattr__(self, "bin_edges", tuple(float(e) for e in self.bin_edges))
        if self.grade_count < 2:
            raise AssessError("grade_count must be at least 2")
        if self.mode == "logistic":
            if self.grade_count != 2:
                raise AssessError("logistic mapping needs exactly two grades")
            if not (np.isfinite(self.steepness) and self.steepness > 0):
                raise AssessError("steepness must be a positive finite number")
        elif self.mode == "binned":
            e = self.bin_edges
            if len(e) != self.grade_count - 1:
                raise AssessError(f"binned mapping needs {self.grade_count - 1} edges, got {len(e)}")
            if any(b <= a for a, b in zip(e, e[1:])) or not np.isfinite(e).all():
                raise AssessError("bin edges must be finite and strictly increasing")
        else:
            raise AssessError(f"unknown belief mapping mode {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "steepness": self.steepness,
            "bin_edges": list(self.bin_edges),
            "grade_count": self.grade_count,
            "invert": self.invert,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BeliefMapping":
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise AssessError(f"unknown belief mapping keys: {sorted(unknown)}")
        return cls(**{k: (tuple(v) if k == "bin_edges" else v) for k, v in d.items()})


def map_decision_to_beliefs(f: float, bm: BeliefMapping) -> tuple[float, ...]:
    """Complete belief vector (sums to 1) for one decision value.

    Logistic: ``(1 - s, s)`` with ``s = 1 / (1 + exp(-steepness * f))``.
    Binned: all belief on the bin holding ``f``; a value equal to an edge
    belongs to the bin above it.
    """
    if not np.isfinite(f):
        raise AssessError(f"decision value must be finite, got {f!r}")
    if bm.mode == "logistic":
        s = float(expit(bm.steepness * f))
        beliefs = [1.0 - s, s]
    else:
        beliefs = [0.0] * bm.grade_count
        beliefs[int(np.searchsorted(bm.bin_edges, f, side="right"))] = 1.0
    if bm.invert:
        beliefs.reverse()
    return tuple(beliefs)


@dataclass(frozen=True)
class IndexInput:
    """One index for :func:`assess`: give a decision value or beliefs, not both."""

    id: str
    weight: float
    decision_value: float | None = None
    beliefs: tuple[float, ...] | None = None

    def __post_init__(self):
        if (self.decision_value is None) == (self.beliefs is None):
            raise AssessError(f"index {self.id!r}: give exactly one of decision_value or beliefs")


def _as_input(item) -> IndexInput:
    if isinstance(item, IndexInput):
        return item
    ident, weight, payload = item
    if np.ndim(payload) == 0:
        return IndexInput(str(ident), float(weight), decision_value=float(payload))
    return IndexInput(str(ident), float(weight), beliefs=tuple(payload))


def _canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(obj: Any) -> str:
    return hashlib.sha256(_canonical(obj).encode()).hexdigest()


@dataclass(frozen=True)
class RiskAssessment:
    inputs: tuple[dict, ...]
    combined: er.MassDistribution
    beliefs: tuple[float, ...]
    intersection_beliefs: tuple[float, ...]
    grade: str
    grade_index: int
    score: er.RiskScore
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "inputs": [dict(x) for x in self.inputs],
            "combined": self.combined.to_dict(),
            "final_beliefs": list(self.beliefs),
            "intersection_beliefs": list(self.intersection_beliefs),
            "risk_grade": self.grade,
            "risk_grade_index": self.grade_index,
            "risk_score": {
                "score": self.score.score,
                "lower": self.score.lower,
                "upper": self.score.upper,
            },
            "provenance": self.provenance,
        }


def pick_grade(beliefs: Sequence[float]) -> int:
    """Index of the largest belief; near-ties go to the later (riskier) grade."""
    b = np.asarray(beliefs)
    return int(np.flatnonzero(b >= b.max() - TIE_TOL)[-1])


def assess(
    indexes: Sequence,
    bm: BeliefMapping,
    grades: er.GradeSet,
    provenance: Mapping | None = None,
) -> RiskAssessment:
    """Fuse assessment indexes into a :class:`RiskAssessment`.

    ``indexes`` holds :class:`IndexInput` records or ``(id, weight,
    value)`` tuples, where ``value`` is a decision value (scalar) or a
    belief vector.
    """
    items = [_as_input(x) for x in indexes]
    if not items:
        raise AssessError("at least one assessment index is required")
    records, masses = [], []
    for it in items:
        if it.beliefs is not None:
            beliefs = tuple(float(b) for b in it.beliefs)
        else:
            if bm.grade_count != grades.size:
                raise AssessError(
                    f"belief mapping produces {bm.grade_count} grades, grade set has {grades.size}"
                )
            beliefs = map_decision_to_beliefs(it.decision_value, bm)
        if len(beliefs) != grades.size:
            raise AssessError(f"index {it.id!r}: {len(beliefs)} beliefs for {grades.size} grades")
        idx = er.AssessmentIndex(it.id, it.weight, beliefs)
        masses.append(er.assign_masses(idx))
        records.append({
            "id": it.id,
            "weight": it.weight,
            "decision_value": it.decision_value,
            "beliefs": list(beliefs),
        })

    combined = er.combine(masses)
    final = er.final_beliefs(combined)
    inter = er.final_intersection_beliefs(combined) if grades.fuzzy else ()
    k = pick_grade(final)
    score = er.risk_score(final, grades, inter) if grades.utilities is not None else er.RiskScore(
        float("nan"), float("nan"), float("nan"))

    prov = dict(provenance or {})
    prov["config_hash"] = config_hash({
        "belief_mapping": bm.to_dict(),
        "grades": grades.to_dict(),
        "provenance": {k2: v for k2, v in prov.items() if k2 != "config_hash"},
    })
    return RiskAssessment(tuple(records), combined, final, inter, grades.grades[k], k, score, prov)


@dataclass(frozen=True)
class PipelineIndex:
    id: str
    weight: float
    model: SvmModel
    columns: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SvmErPipeline:
    """Classifier-backed assessment: one SVM per index, fused by ER.

    Inputs are raw feature rows; ``scaling`` (if any) is applied before
    each index picks its ``columns``.
    """

    indexes: tuple[PipelineIndex, ...]
    belief_mapping: BeliefMapping = BeliefMapping()
    grades: er.GradeSet = er.GradeSet(("secure", "at-risk"), (0.0, 1.0))
    scaling: ScalingParams | None = None
    provenance: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not self.indexes:
            raise AssessError("pipeline needs at least one index")
        if self.belief_mapping.grade_count != self.grades.size:
            raise AssessError("belief mapping and grade set disagree on grade count")

    @property
    def kernel_evals_per_sample(self) -> int:
        return sum(ix.model.n_support for ix in self.indexes)

    def _decision_matrix(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if self.scaling is not None:
            X = self.scaling.transform(X)
        cols = []
        for ix in self.indexes:
            Xi = X if ix.columns is None else X[:, list(ix.columns)]
            cols.append(decision_values(ix.model, Xi))
        return np.column_stack(cols)

    def assess_many(self, X) -> list[RiskAssessment]:
        F = self._decision_matrix(X)
        return [
            assess(
                [IndexInput(ix.id, ix.weight, decision_value=float(v)) for ix, v in zip(self.indexes, row)],
                self.belief_mapping,
                self.grades,
                self.provenance,
            )
            for row in F
        ]

    def assess_row(self, x) -> RiskAssessment:
        return self.assess_many(np.asarray(x, dtype=float).reshape(1, -1))[0]

    def predict(self, X) -> np.ndarray:
        """+1 when the fused grade falls in the upper (riskier) half of the scale."""
        cut = (self.grades.size + 1) // 2
        return np.array([1 if ra.grade_index >= cut else -1 for ra in self.assess_many(X)])
