"""Evidential reasoning: weighted mass assignment and analytical fusion.

Each assessment index ``i`` carries a weight ``alpha_i`` and belief degrees
``beta_m`` over ordered grades ``P_1 .. P_M``. Its basic masses are

    n_i{P_m} = alpha_i * beta_m
    n_i{H}   = 1 - sum_m n_i{P_m}          (mass left unassigned)
    nbar_i   = 1 - alpha_i                 (part of n_i{H} due to weight)
    ntil_i   = alpha_i * (1 - sum_m beta_m)  (part due to incomplete belief)

``N`` indexes are fused in closed form with normalizer ``j``:

    n{P_m} = j * [prod_i (n_i{P_m} + n_i{H}) - prod_i n_i{H}]
    nbar   = j * prod_i nbar_i
    ntil   = j * [prod_i n_i{H} - prod_i nbar_i]
    1 / j  = sum_m prod_i (n_i{P_m} + n_i{H}) - (M - 1) * prod_i n_i{H}

This equals sequential Dempster combination with ``H`` as the whole frame.
In fuzzy mode the M - 1 adjacent-grade intersections ``P_{m,m+1}`` are
extra mass slots that fuse exactly like grades.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

import numpy as np

MASS_TOL = 1e-9
NEG_TOL = 1e-12


class ERError(ValueError):
    pass


class ConflictError(ERError):
    """The evidence is in total conflict; no normalization exists."""


@dataclass(frozen=True)
class GradeSet:
    grades: tuple[str, ...]
    utilities: tuple[float, ...] | None = None
    fuzzy: bool = False

    def __post_init__(self):
        grades = tuple(self.grades)
        if len(grades) < 2:
            raise ERError("a grade set needs at least two grades")
        if len(set(grades)) != len(grades):
            raise ERError(f"grade names must be unique: {grades}")
        object.__setattr__(self, "grades", grades)
        if self.utilities is not None:
            u = tuple(float(x) for x in self.utilities)
            if len(u) != len(grades):
                raise ERError("need one utility per grade")
            if any(not 0 <= x <= 1 for x in u):
                raise ERError("utilities must lie in [0, 1]")
            if any(b <= a for a, b in zip(u, u[1:])):
                raise ERError("utilities must be strictly increasing")
            object.__setattr__(self, "utilities", u)

    @property
    def size(self) -> int:
        return len(self.grades)

    @classmethod
    def evenly_spaced(cls, names: Sequence[str], fuzzy: bool = False) -> "GradeSet":
        M = len(names)
        return cls(tuple(names), tuple(m / (M - 1) for m in range(M)), fuzzy)

    def to_dict(self) -> dict:
        u = self.utilities or (None,) * self.size
        return {
            "grades": [{"name": g, "utility": x} for g, x in zip(self.grades, u)],
            "fuzzy": self.fuzzy,
        }


@dataclass(frozen=True)
class AssessmentIndex:
    """One piece of evidence: weight in [0, 1] and belief degrees per grade.

    ``intersection_beliefs`` (fuzzy grade sets only) holds belief in the
    M - 1 adjacent-grade overlaps.
    """

    id: str
    weight: float
    beliefs: tuple[float, ...]
    intersection_beliefs: tuple[float, ...] = ()

    def __post_init__(self):
        beliefs = tuple(float(b) for b in self.beliefs)
        inter = tuple(float(b) for b in self.intersection_beliefs)
        object.__setattr__(self, "beliefs", beliefs)
        object.__setattr__(self, "intersection_beliefs", inter)
        if not 0 <= self.weight <= 1:
            raise ERError(f"index {self.id!r}: weight {self.weight!r} outside [0, 1]")
        if len(beliefs) < 2:
            raise ERError(f"index {self.id!r}: need beliefs for at least two grades")
        if inter and len(inter) != len(beliefs) - 1:
            raise ERError(f"index {self.id!r}: need {len(beliefs) - 1} intersection beliefs")
        if any(not np.isfinite(b) or b < 0 for b in beliefs + inter):
            raise ERError(f"index {self.id!r}: beliefs must be finite and non-negative")
        if sum(beliefs) + sum(inter) > 1 + NEG_TOL:
            raise ERError(f"index {self.id!r}: beliefs sum to {sum(beliefs) + sum(inter)!r} > 1")


@dataclass(frozen=True)
class MassDistribution:
    assigned: tuple[float, ...]
    unassigned: float
    weight_residual: float
    incompleteness_residual: float
    fuzzy_intersections: tuple[float, ...] = ()
    normalization: float = 1.0
    sources: tuple[str, ...] = ()

    def __post_init__(self):
        assigned = tuple(float(x) for x in self.assigned)
        M = len(assigned)
        inter = tuple(float(x) for x in self.fuzzy_intersections) or (0.0,) * (M - 1)
        if len(inter) != M - 1:
            raise ERError(f"need {M - 1} fuzzy intersection masses, got {len(inter)}")
        object.__setattr__(self, "assigned", assigned)
        object.__setattr__(self, "fuzzy_intersections", inter)
        object.__setattr__(self, "sources", tuple(self.sources))
        parts = assigned + inter + (self.unassigned, self.weight_residual, self.incompleteness_residual)
        if min(parts) < -NEG_TOL:
            raise ERError(f"negative mass component: {parts}")
        if abs(self.total() - 1) > MASS_TOL:
            raise ERError(f"masses sum to {self.total()!r}, expected 1")
        if abs(self.unassigned - self.weight_residual - self.incompleteness_residual) > MASS_TOL:
            raise ERError("unassigned mass does not split into weight and incompleteness residuals")

    @property
    def grade_count(self) -> int:
        return len(self.assigned)

    def total(self) -> float:
        return sum(self.assigned) + sum(self.fuzzy_intersections) + self.unassigned

    def to_dict(self) -> dict:
        return {
            "assigned": list(self.assigned),
            "unassigned": self.unassigned,
            "weight_residual": self.weight_residual,
            "incompleteness_residual": self.incompleteness_residual,
            "fuzzy_intersections": list(self.fuzzy_intersections),
            "normalization": self.normalization,
            "sources": list(self.sources),
        }


def assign_masses(idx: AssessmentIndex) -> MassDistribution:
    """Discount an index's beliefs by its weight."""
    a = idx.weight
    assigned = tuple(a * b for b in idx.beliefs)
    inter = tuple(a * b for b in idx.intersection_beliefs)
    unassigned = 1.0 - sum(assigned) - sum(inter)
    incompleteness = a * (1.0 - sum(idx.beliefs) - sum(idx.intersection_beliefs))
    return MassDistribution(
        assigned=assigned,
        unassigned=unassigned,
        weight_residual=1.0 - a,
        incompleteness_residual=incompleteness,
        fuzzy_intersections=inter,
        sources=(idx.id,),
    )


def _slots(md: MassDistribution, fuzzy: bool) -> np.ndarray:
    return np.array(md.assigned + md.fuzzy_intersections if fuzzy else md.assigned)


def combine(masses: Sequence[MassDistribution]) -> MassDistribution:
    """Fuse any number of mass distributions in one analytical step."""
    masses = list(masses)
    if not masses:
        raise ERError("nothing to combine")
    M = masses[0].grade_count
    if any(md.grade_count != M for md in masses):
        raise ERError(f"grade counts differ: {[md.grade_count for md in masses]}")
    if len(masses) == 1:
        return masses[0]
    fuzzy = any(any(md.fuzzy_intersections) for md in masses)

    slot_terms = np.ones(2 * M - 1 if fuzzy else M)
    prod_h = 1.0
    prod_bar = 1.0
    for md in masses:
        slot_terms *= _slots(md, fuzzy) + md.unassigned
        prod_h *= md.unassigned
        prod_bar *= md.weight_residual

    K = slot_terms.size
    denom = float(slot_terms.sum() - (K - 1) * prod_h)
    sources = tuple(s for md in masses for s in md.sources)
    if not denom > 0:
        raise ConflictError(f"total conflict between indexes {list(sources)}")
    j = 1.0 / denom
    fused = j * (slot_terms - prod_h)
    return MassDistribution(
        assigned=tuple(fused[:M]),
        unassigned=j * prod_h,
        weight_residual=j * prod_bar,
        incompleteness_residual=j * (prod_h - prod_bar),
        fuzzy_intersections=tuple(fused[M:]) if fuzzy else (),
        normalization=j,
        sources=sources,
    )


def combine_pairwise(masses: Sequence[MassDistribution]) -> MassDistribution:
    """Fuse by explicit focal-element enumeration, one pair at a time.

    Same result as :func:`combine`, at quadratic cost per pair; kept as
    the unoptimized comparison route for benchmarks.
    """
    masses = list(masses)
    if not masses:
        raise ERError("nothing to combine")
    M = masses[0].grade_count
    if any(md.grade_count != M for md in masses):
        raise ERError("grade counts differ")

    def focal(md: MassDistribution) -> dict:
        out = {("slot", k): v for k, v in enumerate(md.assigned + md.fuzzy_intersections)}
        out["Hbar"] = md.weight_residual
        out["Htil"] = md.incompleteness_residual
        return out

    def meet(x, y):
        if x in ("Hbar", "Htil") and y in ("Hbar", "Htil"):
            return "Hbar" if x == y == "Hbar" else "Htil"
        if x in ("Hbar", "Htil"):
            return y
        if y in ("Hbar", "Htil"):
            return x
        return x if x == y else None

    acc = focal(masses[0])
    sources = list(masses[0].sources)
    for md in masses[1:]:
        nxt: dict = {}
        conflict = 0.0
        for x, mx in acc.items():
            for y, my in focal(md).items():
                z = meet(x, y)
                if z is None:
                    conflict += mx * my
                else:
                    nxt[z] = nxt.get(z, 0.0) + mx * my
        sources += md.sources
        keep = 1.0 - conflict
        if not keep > 0:
            raise ConflictError(f"total conflict between indexes {sources}")
        acc = {z: v / keep for z, v in nxt.items()}

    slots = [acc.get(("slot", k), 0.0) for k in range(2 * M - 1)]
    hbar, htil = acc.get("Hbar", 0.0), acc.get("Htil", 0.0)
    return MassDistribution(
        assigned=tuple(slots[:M]),
        unassigned=hbar + htil,
        weight_residual=hbar,
        incompleteness_residual=htil,
        fuzzy_intersections=tuple(slots[M:]),
        sources=tuple(sources),
    )


def final_beliefs(combined: MassDistribution) -> tuple[float, ...]:
    """Grade beliefs after removing the weight residual.

    Incompleteness is left unassigned, so the result may sum to less than 1.
    """
    keep = 1.0 - combined.weight_residual
    if not keep > 0:
        raise ERError("every index has zero weight; beliefs are undefined")
    return tuple(x / keep for x in combined.assigned)


def final_intersection_beliefs(combined: MassDistribution) -> tuple[float, ...]:
    keep = 1.0 - combined.weight_residual
    if not keep > 0:
        raise ERError("every index has zero weight; beliefs are undefined")
    return tuple(x / keep for x in combined.fuzzy_intersections)


class RiskScore(NamedTuple):
    score: float
    lower: float
    upper: float


def risk_score(
    beliefs: Sequence[float],
    grades: GradeSet,
    intersection_beliefs: Sequence[float] = (),
) -> RiskScore:
    """Expected utility with unassigned belief pushed to the worst/best grade.

    Belief in an intersection ``P_{m,m+1}`` counts at ``u_m`` for the
    lower bound and ``u_{m+1}`` for the upper bound.
    """
    if grades.utilities is None:
        raise ERError("risk_score needs a grade set with utilities")
    u = np.array(grades.utilities)
    b = np.asarray(beliefs, dtype=float)
    if b.shape != u.shape:
        raise ERError(f"expected {u.size} beliefs, got {b.size}")
    inter = np.asarray(intersection_beliefs, dtype=float)
    if inter.size and inter.size != u.size - 1:
        raise ERError(f"expected {u.size - 1} intersection beliefs, got {inter.size}")
    if (b < -NEG_TOL).any() or (inter < -NEG_TOL).any():
        raise ERError("beliefs must be non-negative")
    base = float(b @ u)
    lo, hi = base, base
    if inter.size:
        lo += float(inter @ u[:-1])
        hi += float(inter @ u[1:])
    residual = 1.0 - b.sum() - inter.sum()
    if residual < -MASS_TOL:
        raise ERError(f"beliefs sum to {1 - residual!r} > 1")
    residual = max(residual, 0.0)
    lo += residual * u[0]
    hi += residual * u[-1]
    return RiskScore((lo + hi) / 2, lo, hi)


def load_assessment_spec(source: str | Path | Mapping) -> tuple[GradeSet, list[dict]]:
    """Parse ``{grades: [{name, utility}], indexes: [...], fuzzy: bool}``.

    Index entries are returned as raw dicts because an entry may name a
    classifier instead of fixed beliefs; :mod:`svmer.assess` resolves them.
    """
    if isinstance(source, Mapping):
        doc = source
    else:
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    try:
        raw_grades = doc["grades"]
        names = [g["name"] if isinstance(g, Mapping) else g for g in raw_grades]
        utils = [g.get("utility") if isinstance(g, Mapping) else None for g in raw_grades]
    except (KeyError, TypeError) as exc:
        raise ERError(f"malformed grades in assessment spec: {exc}") from None
    if all(u is None for u in utils):
        grades = GradeSet.evenly_spaced(names, fuzzy=bool(doc.get("fuzzy", False)))
    elif any(u is None for u in utils):
        raise ERError("either every grade has a utility or none does")
    else:
        grades = GradeSet(tuple(names), tuple(utils), bool(doc.get("fuzzy", False)))
    indexes = list(doc.get("indexes", []))
    for entry in indexes:
        if "id" not in entry or "weight" not in entry:
            raise ERError(f"index entry needs 'id' and 'weight': {entry}")
        w = entry["weight"]
        if not isinstance(w, (int, float)) or not 0 <= w <= 1:
            raise ERError(f"index {entry['id']!r}: weight {w!r} outside [0, 1]")
    return grades, indexes
