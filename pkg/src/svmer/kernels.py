"""Kernel functions and Gram matrix assembly.

Four kernel families are supported::

    linear       <a, a2>
    polynomial   (pi * <a, a2> + r) ** d
    rbf          exp(-gamma * ||a - a2||^2)
    sigmoid      tanh(pi * <a, a2> + r)

``pi`` is the kernel scale. It is unrelated to the dual weights that the
SVM trainer also calls pi. The sigmoid kernel is not positive semidefinite
in general.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial.distance import cdist

KINDS = ("linear", "polynomial", "rbf", "sigmoid")

_REQUIRED = {
    "linear": (),
    "polynomial": ("pi", "r", "d"),
    "rbf": ("gamma",),
    "sigmoid": ("pi", "r"),
}


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    pi: float | None = None
    r: float | None = None
    d: int | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KernelError(f"unknown kernel kind {self.kind!r}; valid kinds: {', '.join(KINDS)}")
        needed = _REQUIRED[self.kind]
        for name in ("pi", "r", "d", "gamma"):
            value = getattr(self, name)
            if name in needed and value is None:
                raise KernelError(f"{self.kind} kernel needs parameter {name!r}")
            if name not in needed and value is not None:
                raise KernelError(f"{self.kind} kernel does not take parameter {name!r}")
        if self.pi is not None and not (np.isfinite(self.pi) and self.pi > 0):
            raise KernelError(f"pi must be a positive finite number, got {self.pi!r}")
        if self.gamma is not None and not (np.isfinite(self.gamma) and self.gamma > 0):
            raise KernelError(f"gamma must be a positive finite number, got {self.gamma!r}")
        if self.r is not None and not np.isfinite(self.r):
            raise KernelError("r must be finite")
        if self.d is not None:
            if int(self.d) != self.d or self.d < 1:
                raise KernelError(f"degree d must be a positive integer, got {self.d!r}")
            object.__setattr__(self, "d", int(self.d))

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls("linear")

    @classmethod
    def polynomial(cls, pi: float = 1.0, r: float = 1.0, d: int = 2) -> "KernelSpec":
        return cls("polynomial", pi=pi, r=r, d=d)

    @classmethod
    def rbf(cls, gamma: float = 1.0) -> "KernelSpec":
        return cls("rbf", gamma=gamma)

    @classmethod
    def sigmoid(cls, pi: float = 1.0, r: float = 0.0) -> "KernelSpec":
        return cls("sigmoid", pi=pi, r=r)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "pi": self.pi, "r": self.r, "d": self.d, "gamma": self.gamma}

    @classmethod
    def from_dict(cls, d: Mapping) -> "KernelSpec":
        unknown = set(d) - {"kind", "pi", "r", "d", "gamma"}
        if unknown:
            raise KernelError(f"unknown kernel keys: {sorted(unknown)}")
        if "kind" not in d:
            raise KernelError("kernel object needs a 'kind'")
        return cls(d["kind"], pi=d.get("pi"), r=d.get("r"), d=d.get("d"), gamma=d.get("gamma"))


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    return X


def kernel_matrix(k: KernelSpec, A, B) -> np.ndarray:
    """Kernel values between every row of ``A`` and every row of ``B``."""
    A, B = _as_matrix(A), _as_matrix(B)
    if A.shape[1] != B.shape[1]:
        raise KernelError(f"feature length mismatch: {A.shape[1]} vs {B.shape[1]}")
    if k.kind == "rbf":
        # cdist differences directly, so identical rows give exactly 0
        return np.exp(-k.gamma * cdist(A, B, "sqeuclidean"))
    # overflow shows up as inf; callers that need finite values check for it
    with np.errstate(over="ignore", invalid="ignore"):
        dots = A @ B.T
        if k.kind == "linear":
            return dots
        if k.kind == "polynomial":
            return (k.pi * dots + k.r) ** k.d
        return np.tanh(k.pi * dots + k.r)


def eval_kernel(k: KernelSpec, a: Sequence[float], a2: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float).reshape(-1)
    a2 = np.asarray(a2, dtype=float).reshape(-1)
    if a.shape != a2.shape:
        raise KernelError(f"vector lengths differ: {a.size} vs {a2.size}")
    if not (np.isfinite(a).all() and np.isfinite(a2).all()):
        raise KernelError("kernel inputs must be finite")
    with np.errstate(over="ignore", invalid="ignore"):
        if k.kind == "linear":
            value = float(a @ a2)
        elif k.kind == "polynomial":
            value = float((k.pi * (a @ a2) + k.r) ** k.d)
        elif k.kind == "rbf":
            diff = a - a2
            value = float(np.exp(-k.gamma * (diff @ diff)))
        else:
            value = float(np.tanh(k.pi * (a @ a2) + k.r))
    if not np.isfinite(value):
        raise KernelError("kernel value is not finite")
    return value


@dataclass(frozen=True, eq=False)
class GramMatrix:
    entries: np.ndarray
    kernel: KernelSpec
    sample_ids: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def gram_matrix(k: KernelSpec, ds, sample_ids: Sequence[int] | None = None) -> GramMatrix:
    """Assemble the m x m Gram matrix for a dataset (or a raw feature array).

    Only the upper triangle is kept and mirrored, so the result is exactly
    symmetric.
    """
    X = ds.features if hasattr(ds, "features") else _as_matrix(ds)
    if X.shape[0] == 0:
        raise KernelError("cannot build a Gram matrix for an empty dataset")
    if not np.isfinite(X).all():
        raise KernelError("features must be finite")
    K = kernel_matrix(k, X, X)
    upper = np.triu(K)
    G = upper + np.triu(K, 1).T
    bad = np.argwhere(~np.isfinite(G))
    if bad.size:
        i, j = bad[0]
        raise KernelError(f"non-finite kernel value at ({i}, {j})")
    G.flags.writeable = False
    ids = tuple(range(X.shape[0])) if sample_ids is None else tuple(int(i) for i in sample_ids)
    return GramMatrix(G, k, ids)
