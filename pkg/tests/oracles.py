"""Brute-force reference computations used by the tests.

Nothing here imports the code paths it checks.
"""

from __future__ import annotations

import numpy as np

# ---------------------------------------------------------------------------
# Dempster combination by outcome enumeration
#
# A mass function maps focal sets to mass. Focal sets are frozensets of grade
# indices; the whole frame carries a tag, "bar" for mass that is
# unassigned because of the index weight and "til" for mass unassigned
# because beliefs were incomplete. Intersecting two whole-frame masses
# stays "bar" only when both are "bar".


def mass_function(weight, beliefs):
    K = len(beliefs)
    frame = frozenset(range(K))
    m = {}
    for k, b in enumerate(beliefs):
        if weight * b:
            m[(frozenset([k]), None)] = weight * b
    m[(frame, "bar")] = 1.0 - weight
    m[(frame, "til")] = weight * (1.0 - sum(beliefs))
    return m


def dempster(m1, m2):
    out = {}
    conflict = 0.0
    for (A, ta), va in m1.items():
        for (B, tb), vb in m2.items():
            C = A & B
            if not C:
                conflict += va * vb
                continue
            if ta is not None and tb is not None:
                tag = "bar" if ta == tb == "bar" else "til"
            else:
                tag = None
            out[(C, tag)] = out.get((C, tag), 0.0) + va * vb
    keep = 1.0 - conflict
    if keep <= 0:
        raise ZeroDivisionError("total conflict")
    return {k: v / keep for k, v in out.items()}


def dempster_fuse(indexes):
    """indexes: list of (weight, beliefs). Returns (grade masses, bar, til)."""
    acc = mass_function(*indexes[0])
    for w, b in indexes[1:]:
        acc = dempster(acc, mass_function(w, b))
    K = len(indexes[0][1])
    grades = [sum(v for (A, t), v in acc.items() if t is None and A == frozenset([k])) for k in range(K)]
    bar = sum(v for (A, t), v in acc.items() if t == "bar")
    til = sum(v for (A, t), v in acc.items() if t == "til")
    return np.array(grades), bar, til


# ---------------------------------------------------------------------------
# biasless SVM dual by lattice search


def dual_objective(P, G, b):
    """W(pi) = sum(pi) - 1/2 sum_ij pi_i pi_j b_i b_j G_ij for each row of P."""
    Q = (b[:, None] * b[None, :]) * G
    return P.sum(axis=1) - 0.5 * np.einsum("ni,ij,nj->n", P, Q, P)


def _best_on_lattice(axes, G, b):
    """Evaluate every lattice point, one slab of the first axis at a time."""
    best_val, best = -np.inf, None
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), -1).reshape(-1, len(axes) - 1)
    for v in axes[0]:
        block = np.column_stack([np.full(len(rest), v), rest])
        vals = dual_objective(block, G, b)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best = vals[i], block[i]
    return best


def qp_grid(G, b, D, steps=50, exhaustive_upto=3, coarse_steps=10):
    """Maximize the biasless dual over the lattice {0, D/steps, ..., D}^m.

    Up to ``exhaustive_upto`` points the whole lattice is enumerated. Beyond
    that a coarse lattice (step D/coarse_steps) is enumerated first, then
    the fine lattice within one coarse step of the coarse winner.
    """
    G = np.asarray(G, float)
    b = np.asarray(b, float)
    m = len(b)
    fine = np.linspace(0.0, D, steps + 1)
    if m <= exhaustive_upto:
        return _best_on_lattice([fine] * m, G, b)
    coarse = np.linspace(0.0, D, coarse_steps + 1)
    c = _best_on_lattice([coarse] * m, G, b)
    h = D / coarse_steps
    axes = [fine[(fine >= ci - h - 1e-12) & (fine <= ci + h + 1e-12)] for ci in c]
    # every axis above has 2*steps/coarse_steps + 1 points at most
    return _best_on_lattice(axes, G, b)


def dual_decision_values(pi, G, b):
    return G @ (np.asarray(pi) * np.asarray(b))


# ---------------------------------------------------------------------------
# confusion counts


def count_confusion(pred, truth):
    tp = fp = fn = tn = 0
    for p, t in zip(pred, truth):
        if p == 1 and t == 1:
            tp += 1
        elif p == 1:
            fp += 1
        elif t == 1:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn
