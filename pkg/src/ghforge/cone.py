"""3-point metric spaces as points of a polyhedral cone in R^3 with the max norm.

A triangle with sorted sides a <= b <= c maps to (a, b, c)/2; the GH distance
between two 3-point spaces is the max-norm distance between their images.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lp import simplex
from .metric import TOL, FiniteMetricSpace, MetricError, new_space, sorted_distance_triple

Triple = Sequence[float]


def in_closed_cone(x: Triple, tol: float = TOL) -> bool:
    a, b, c = x
    return -tol <= a <= b + tol and b <= c + tol and c <= a + b + tol


def in_open_cone(x: Triple, tol: float = TOL) -> bool:
    """Cone with a > 0: images of 3-point spaces, degenerate triangles included."""
    return x[0] > tol and in_closed_cone(x, tol)


def is_strict(x: Triple, tol: float = TOL) -> bool:
    """All triangle inequalities strict: the nondegenerate part of the cone."""
    a, b, c = x
    return in_open_cone(x, tol) and c < a + b - tol


@dataclass(frozen=True)
class ConePoint:
    x: tuple[float, float, float]
    is_in_cone: bool
    is_interior: bool

    @classmethod
    def of(cls, x: Triple, tol: float = TOL) -> "ConePoint":
        t = tuple(float(v) for v in x)
        return cls(t, in_open_cone(t, tol), is_strict(t, tol))

    def __iter__(self):
        return iter(self.x)


def nu(space: FiniteMetricSpace) -> ConePoint:
    if space.n != 3:
        raise MetricError(f"nu needs a 3-point space, got {space.n} points")
    t = sorted_distance_triple(space)
    return ConePoint.of((t.a / 2, t.b / 2, t.c / 2), space.tol)


def nu_inverse(p: ConePoint | Triple, tol: float = TOL) -> FiniteMetricSpace:
    """3-point space with sides 2a, 2b, 2c; rejects points outside the cone."""
    x = tuple(p.x if isinstance(p, ConePoint) else p)
    a, b, c = (float(v) for v in x)
    if not in_open_cone((a, b, c), tol):
        raise MetricError(f"{(a, b, c)} is outside the cone 0 < a <= b <= c <= a + b")
    return new_space([[0, 2 * c, 2 * b], [2 * c, 0, 2 * a], [2 * b, 2 * a, 0]], tol=tol)


def linf_distance(p: Triple, q: Triple) -> float:
    return float(np.max(np.abs(np.asarray(tuple(p), dtype=float) - np.asarray(tuple(q), dtype=float))))


def gh_via_cone(s1: FiniteMetricSpace, s2: FiniteMetricSpace) -> float:
    return linf_distance(nu(s1), nu(s2))


@dataclass(frozen=True)
class StarSolution:
    center: tuple[float, float, float]
    legs: tuple[float, float, float]
    total: float
    dual_bound: float  # LP dual objective; equals total at a certified optimum

    @property
    def certified(self) -> bool:
        return abs(self.total - self.dual_bound) <= 1e-7 * max(1.0, self.total)


def linf_star_optimum(terminals: Sequence[Triple]) -> StarSolution:
    """Point minimizing the summed max-norm distance to three terminals, via an LP.

    The center is shifted to the terminals' bounding-box corner (clipping to the
    box never lengthens a leg), so all LP variables are nonnegative.
    """
    P = np.array([tuple(t) for t in terminals], dtype=float)
    k, dim = P.shape
    lo = P.min(axis=0)
    Q = P - lo
    # variables: u (dim), t (k); rows: u_j - t_i <= Q_ij and -u_j - t_i <= -Q_ij
    nv = dim + k
    A, b = [], []
    for i in range(k):
        for j in range(dim):
            row = np.zeros(nv)
            row[j], row[dim + i] = 1.0, -1.0
            A.append(row)
            b.append(Q[i, j])
            row = np.zeros(nv)
            row[j], row[dim + i] = -1.0, -1.0
            A.append(row)
            b.append(-Q[i, j])
    c = np.concatenate([np.zeros(dim), np.ones(k)])
    res = simplex(c, np.array(A), np.array(b))
    if not res.ok:
        raise RuntimeError(f"star LP failed: {res.status}")
    center = res.x[:dim] + lo
    legs = tuple(linf_distance(center, p) for p in P)
    dual = float(np.array(b) @ res.duals_ub)
    return StarSolution(tuple(float(v) for v in center), legs, float(sum(legs)), dual)


def half_perimeter(points: Sequence[Triple]) -> float:
    p = [tuple(t) for t in points]
    return 0.5 * (linf_distance(p[0], p[1]) + linf_distance(p[0], p[2]) + linf_distance(p[1], p[2]))
