"""Finite (pseudo)metric spaces stored as dense distance matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TOL = 1e-9

MODES = ("metric", "pseudometric", "raw")


class MetricError(ValueError):
    """Raised when a matrix fails validation; ``entry`` names the offending cell."""

    def __init__(self, message: str, entry: tuple[int, ...] | None = None):
        super().__init__(message)
        self.entry = entry


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    d: np.ndarray
    labels: tuple[str, ...] | None = None
    mode: str = "metric"
    tol: float = field(default=TOL, repr=False)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={self.n}, mode={self.mode!r}, d={self.d.tolist()})"

    def permuted(self, perm: Sequence[int]) -> "FiniteMetricSpace":
        """Relabel points: new point ``k`` is old point ``perm[k]``."""
        p = np.asarray(perm, dtype=int)
        labels = None if self.labels is None else tuple(self.labels[i] for i in p)
        return FiniteMetricSpace(_freeze(self.d[np.ix_(p, p)]), labels, self.mode, self.tol)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def new_space(matrix, mode: str = "metric", labels: Sequence[str] | None = None,
              tol: float = TOL) -> FiniteMetricSpace:
    """Validate ``matrix`` and wrap it as a space.

    ``raw`` mode checks only shape, finiteness, symmetry and the zero diagonal;
    ``pseudometric`` additionally requires nonnegativity and the triangle
    inequality; ``metric`` also forbids zero off-diagonal entries.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    d = np.array(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise MetricError(f"distance matrix must be square and nonempty, got shape {d.shape}")
    n = d.shape[0]
    if not np.all(np.isfinite(d)):
        i, j = map(int, np.argwhere(~np.isfinite(d))[0])
        raise MetricError(f"non-finite entry d[{i}][{j}]", (i, j))
    diag = np.abs(np.diag(d))
    if np.any(diag > tol):
        i = int(np.argmax(diag))
        raise MetricError(f"nonzero diagonal entry d[{i}][{i}] = {d[i, i]}", (i, i))
    asym = np.abs(d - d.T)
    if np.any(asym > tol):
        i, j = map(int, np.unravel_index(np.argmax(asym), asym.shape))
        raise MetricError(f"asymmetric entries d[{i}][{j}] = {d[i, j]} != d[{j}][{i}] = {d[j, i]}",
                          (i, j))
    # symmetrize exactly so downstream code can rely on d == d.T
    d = np.triu(d, 1)
    d = d + d.T
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise MetricError(f"{len(labels)} labels for {n} points")
    if mode != "raw":
        if np.any(d < -tol):
            i, j = map(int, np.argwhere(d < -tol)[0])
            raise MetricError(f"negative entry d[{i}][{j}] = {d[i, j]}", (i, j))
        d = np.maximum(d, 0.0)
        if mode == "metric":
            off = d + np.eye(n) * (tol + 1.0)
            if np.any(off <= tol):
                i, j = map(int, np.argwhere(off <= tol)[0])
                raise MetricError(f"zero off-diagonal entry d[{i}][{j}] in metric mode", (i, j))
        bad = triangle_violation(d, tol)
        if bad is not None:
            i, j, k = bad
            raise MetricError(
                f"triangle violation d[{i}][{k}] = {d[i, k]} > d[{i}][{j}] + d[{j}][{k}] "
                f"= {d[i, j]} + {d[j, k]}", (i, j, k))
    return FiniteMetricSpace(_freeze(d), labels, mode, tol)


def triangle_violation(d: np.ndarray, tol: float = TOL) -> tuple[int, int, int] | None:
    """First ``(i, j, k)`` with ``d[i,k] > d[i,j] + d[j,k] + tol``, or None."""
    # excess[i, j, k] = d[i,k] - d[i,j] - d[j,k]
    excess = d[:, None, :] - d[:, :, None] - d[None, :, :]
    if np.all(excess <= tol):
        return None
    i, j, k = np.argwhere(excess > tol)[0]
    return int(i), int(j), int(k)


def point_space() -> FiniteMetricSpace:
    return new_space([[0.0]])


def diameter(space: FiniteMetricSpace) -> float:
    return float(space.d.max())


def min_positive_distance(space: FiniteMetricSpace) -> float:
    """Least distance between distinct points (least positive one for pseudometrics)."""
    if space.n < 2:
        raise MetricError("min_positive_distance needs at least two points")
    off = space.d[~np.eye(space.n, dtype=bool)]
    if space.mode == "metric":
        return float(off.min())
    pos = off[off > space.tol]
    if pos.size == 0:
        raise MetricError("all distances are zero")
    return float(pos.min())


def zero_distance_classes(d: np.ndarray, tol: float = TOL) -> list[list[int]]:
    """Group indices at (near) zero distance; classes ordered by smallest member."""
    n = d.shape[0]
    classes: list[list[int]] = []
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        members = [j for j in range(i, n) if not seen[j] and d[i, j] <= tol]
        seen[members] = True
        classes.append(members)
    return classes


def quotient_zero_distances(space: FiniteMetricSpace) -> FiniteMetricSpace:
    """Merge points at zero distance; the representative is each class's first member."""
    classes = zero_distance_classes(space.d, space.tol)
    reps = [c[0] for c in classes]
    d = space.d[np.ix_(reps, reps)]
    labels = None if space.labels is None else tuple(space.labels[i] for i in reps)
    if len(reps) == space.n and space.mode == "metric":
        return space
    return FiniteMetricSpace(_freeze(d), labels, "metric", space.tol)


@dataclass(frozen=True)
class DistanceTriple:
    a: float
    b: float
    c: float

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def is_metric(self, tol: float = TOL) -> bool:
        return self.a > 0 and self.c <= self.a + self.b + tol


def sorted_distance_triple(space: FiniteMetricSpace) -> DistanceTriple:
    if space.n != 3:
        raise MetricError(f"need a 3-point space, got {space.n} points")
    d = space.d
    a, b, c = sorted((float(d[0, 1]), float(d[0, 2]), float(d[1, 2])))
    return DistanceTriple(a, b, c)


def triangle_space(a: float, b: float, c: float, mode: str = "metric") -> FiniteMetricSpace:
    """3-point space with |x0x1| = c, |x0x2| = b, |x1x2| = a (side opposite vertex k)."""
    return new_space([[0, c, b], [c, 0, a], [b, a, 0]], mode=mode)
