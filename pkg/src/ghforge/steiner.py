"""Minimal fillings and Steiner stars for three-point boundaries in GH space.

For a boundary of three finite spaces A1, A2, A3 the shortest tree in GH space
is a star through some finite space Z (a path is the star with Z equal to one
terminal), so its length is min over Z of sum_i d_GH(Z, Ai).  This module gives

* the minimal filling length (half the perimeter of the pairwise GH triangle),
* an LP that, for fixed correspondences Ai <-> {0..N-1}, finds the best Z,
* an alternating heuristic and a best-first exact search over correspondences,
* an interval certificate proving that no Z reaches given legs, and the
  resulting certified lower bound on the star length.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .correspondence import Correspondence, distortion, enumerate_irreducible
from .gh import gh_branch_and_bound, gh_distance
from .lp import simplex
from .metric import (
    TOL,
    FiniteMetricSpace,
    MetricError,
    min_positive_distance,
    new_space,
    quotient_zero_distances,
)

Boundary = Sequence[FiniteMetricSpace]


# --------------------------------------------------------------------------
# minimal fillings


@dataclass(frozen=True)
class FillingResult:
    legs: tuple[float, float, float]
    total: float
    # distances from the abstract star center to each terminal, and the sides used
    star_center_description: dict


def mf_three_point(l1: float, l2: float, l3: float, tol: float = TOL) -> FillingResult:
    """Star filling of a 3-point space whose side opposite terminal i is ``li``."""
    ls = (float(l1), float(l2), float(l3))
    legs = tuple((ls[(i + 1) % 3] + ls[(i + 2) % 3] - ls[i]) / 2 for i in range(3))
    if min(legs) < -tol:
        raise MetricError(f"sides {ls} violate the triangle inequality")
    legs = tuple(max(0.0, v) for v in legs)
    return FillingResult(legs, sum(ls) / 2, {"sides": ls, "center_to_terminal": legs})


def pairwise_gh(boundary: Boundary) -> tuple[float, float, float]:
    """(d(A2,A3), d(A1,A3), d(A1,A2)): the side opposite each terminal."""
    A1, A2, A3 = boundary
    return (gh_distance(A2, A3).value, gh_distance(A1, A3).value, gh_distance(A1, A2).value)


def mf_boundary(boundary: Boundary) -> FillingResult:
    return mf_three_point(*pairwise_gh(boundary))


# --------------------------------------------------------------------------
# star LP


def _pair_index(N: int) -> dict[tuple[int, int], int]:
    return {pq: k for k, pq in enumerate(itertools.combinations(range(N), 2))}


_TRIANGLE_ROWS: dict[int, np.ndarray] = {}


def _triangle_rows(N: int) -> np.ndarray:
    """Rows z_pr - z_pq - z_qr <= 0 over the pair-distance variables."""
    if N not in _TRIANGLE_ROWS:
        idx = _pair_index(N)
        rows = []
        for p, q, r in itertools.combinations(range(N), 3):
            e = {"pq": idx[p, q], "pr": idx[p, r], "qr": idx[q, r]}
            for long, s1, s2 in (("pq", "pr", "qr"), ("pr", "pq", "qr"), ("qr", "pq", "pr")):
                row = np.zeros(len(idx))
                row[e[long]], row[e[s1]], row[e[s2]] = 1.0, -1.0, -1.0
                rows.append(row)
        _TRIANGLE_ROWS[N] = np.array(rows).reshape(-1, len(idx))
    return _TRIANGLE_ROWS[N]


@dataclass(frozen=True)
class StarLP:
    z: FiniteMetricSpace  # N-point pseudometric solution
    Z: FiniteMetricSpace  # its metric quotient
    legs: tuple[float, ...]
    total: float


class StarLPError(RuntimeError):
    pass


def star_lp(boundary: Boundary, corr: Sequence[Correspondence | None], N: int) -> StarLP:
    """Best N-point Z for fixed correspondences ``corr[i]: Ai <-> {0..N-1}``.

    Minimizes t1 + t2 + t3 over pseudometrics z subject to
    | |a a'| - z(p, q) | <= 2 t_i for all (a, p), (a', q) in corr[i].  A ``None``
    entry drops that terminal (its leg is 0), which gives the relaxations used
    by the exact search.
    """
    k = len(boundary)
    idx = _pair_index(N)
    P = len(idx)
    nv = P + k
    A_rows: list[np.ndarray] = []
    b: list[float] = []
    for i, (A, R) in enumerate(zip(boundary, corr)):
        if R is None:
            continue
        if R.shape != (A.n, N):
            raise ValueError(f"correspondence {i} has shape {R.shape}, expected {(A.n, N)}")
        # for each Z pair keep only the extreme source distances
        lo = np.full((N, N), np.inf)
        hi = np.full((N, N), -np.inf)
        ii, pp = np.nonzero(R.pairs)
        for s in range(len(ii)):
            for t in range(len(ii)):
                dist = A.d[ii[s], ii[t]]
                p, q = pp[s], pp[t]
                lo[p, q] = min(lo[p, q], dist)
                hi[p, q] = max(hi[p, q], dist)
        same = float(np.diag(hi).max())
        if same > 0:
            # points of A sharing a Z point: dist <= 2 t_i
            row = np.zeros(nv)
            row[P + i] = -2.0
            A_rows.append(row)
            b.append(-same)
        for (p, q), e in idx.items():
            if np.isinf(lo[p, q]):
                continue
            row = np.zeros(nv)
            row[e], row[P + i] = 1.0, -2.0
            A_rows.append(row)
            b.append(lo[p, q])
            row = np.zeros(nv)
            row[e], row[P + i] = -1.0, -2.0
            A_rows.append(row)
            b.append(-hi[p, q])
    tri = _triangle_rows(N)
    if len(tri):
        A_rows.extend(np.hstack([tri, np.zeros((len(tri), k))]))
        b.extend([0.0] * len(tri))
    c = np.concatenate([np.zeros(P), np.ones(k)])
    if A_rows:
        res = simplex(c, np.array(A_rows), np.array(b))
    else:
        res = simplex(c)
    if not res.ok:
        raise StarLPError(f"star LP failed: {res.status}")
    zmat = np.zeros((N, N))
    for (p, q), e in idx.items():
        zmat[p, q] = zmat[q, p] = max(0.0, res.x[e])
    z = new_space(zmat, mode="pseudometric", tol=1e-7)
    legs = tuple(float(v) for v in res.x[P:])
    return StarLP(z, quotient_zero_distances(z), legs, float(sum(legs)))


# --------------------------------------------------------------------------
# Steiner star reports and solvers


@dataclass
class SteinerStarReport:
    boundary: tuple[FiniteMetricSpace, ...]
    Z: FiniteMetricSpace
    correspondences: tuple[Correspondence, ...]
    legs: tuple[float, ...]
    total: float
    kind: str  # heuristic_upper | exact | certified_lower
    N: int
    lp_solves: int = 0
    restricted: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "total": self.total,
            "legs": list(self.legs),
            "N": self.N,
            "restricted": self.restricted,
            "Z": self.Z.d.tolist(),
            "correspondences": [R.pair_list() for R in self.correspondences],
            "lp_solves": self.lp_solves,
            "note": self.note,
        }


def default_N(boundary: Boundary) -> int:
    return sum(A.n for A in boundary) - (len(boundary) - 1)


def star_legs(boundary: Boundary, z: FiniteMetricSpace):
    """Exact GH legs from ``z`` to each terminal, with optimal correspondences."""
    results = [gh_branch_and_bound(A, z) for A in boundary]
    return tuple(r.value for r in results), tuple(r.witness for r in results)


def _pad(space: FiniteMetricSpace, N: int) -> FiniteMetricSpace:
    """Duplicate the last point so the space has N (pseudometric) points."""
    n = space.n
    if n > N:
        raise ValueError(f"cannot pad {n} points down to {N}")
    src = list(range(n)) + [n - 1] * (N - n)
    return new_space(space.d[np.ix_(src, src)], mode="pseudometric")


def triangle_repair(d: np.ndarray) -> np.ndarray:
    """Lower entries until the triangle inequality holds (shortest-path closure)."""
    d = np.array(d, dtype=float)
    for k in range(d.shape[0]):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


def _aligned_average(boundary: Boundary) -> FiniteMetricSpace | None:
    """Average of 3-point terminals, matched by the order of their sorted sides."""
    if any(A.n != 3 for A in boundary):
        return None
    sides = [sorted((A.d[1, 2], A.d[0, 2], A.d[0, 1])) for A in boundary]
    a, b, c = np.mean(sides, axis=0)
    d = triangle_repair(np.array([[0, c, b], [c, 0, a], [b, a, 0]]))
    return new_space(d, mode="pseudometric")


def _random_start(boundary: Boundary, N: int, rng: np.random.Generator) -> FiniteMetricSpace:
    lo = min(float(A.d[A.d > 0].min()) if A.n > 1 else 0.0 for A in boundary)
    hi = max(float(A.d.max()) for A in boundary)
    m = rng.uniform(0.5 * lo, hi, size=(N, N))
    m = np.triu(m, 1)
    m = m + m.T
    return new_space(triangle_repair(m), mode="pseudometric", tol=1e-7)


def _alternate(boundary: Boundary, z: FiniteMetricSpace, N: int, max_rounds: int, tol: float):
    """Alternate exact correspondences and the star LP until no progress."""
    legs, corr = star_legs(boundary, z)
    total = sum(legs)
    lp_solves = 0
    for _ in range(max_rounds):
        sol = star_lp(boundary, corr, N)
        lp_solves += 1
        new_legs, new_corr = star_legs(boundary, sol.z)
        new_total = sum(new_legs)
        if new_total < total - tol:
            z, legs, corr, total = sol.z, new_legs, new_corr, new_total
        else:
            break
    return z, legs, corr, total, lp_solves


def smt_star_heuristic(boundary: Boundary, N: int | None = None, seed: int = 0,
                       random_starts: int = 3, max_rounds: int = 20,
                       tol: float = TOL) -> SteinerStarReport:
    """Upper bound on the Steiner star length by multi-start alternation.

    Starts: each terminal itself, the side-aligned average of the terminals,
    and ``random_starts`` random metrics drawn from ``seed``.
    """
    boundary = tuple(boundary)
    full_N = default_N(boundary)
    N = full_N if N is None else N
    if N < 1:
        raise ValueError("N must be positive")
    rng = np.random.default_rng(seed)
    starts = [_pad(A, N) for A in boundary if A.n <= N]
    avg = _aligned_average(boundary)
    if avg is not None and N >= 3:
        starts.append(_pad(avg, N))
    starts.extend(_random_start(boundary, N, rng) for _ in range(random_starts))
    if not starts:
        starts.append(_random_start(boundary, N, rng))

    best = None
    lp_total = 0
    for z0 in starts:
        z, legs, corr, total, k = _alternate(boundary, z0, N, max_rounds, tol)
        lp_total += k
        if best is None or total < best[3] - tol:
            best = (z, legs, corr, total)
    z, legs, corr, total = best
    return SteinerStarReport(boundary, quotient_zero_distances(z), corr, legs, total,
                             "heuristic_upper", N, lp_total, restricted=N < full_N)


def _canonical_key(partial: tuple[Correspondence, ...]) -> tuple:
    """Orbit key under relabelings of Z: the sorted multiset of stacked columns."""
    stacked = np.vstack([R.pairs for R in partial])
    return tuple(sorted(tuple(col) for col in stacked.T.tolist()))


def smt_star_exact(boundary: Boundary, N: int | None = None, budget: int = 10**6,
                   tol: float = TOL) -> SteinerStarReport:
    """Best-first search over irreducible correspondence triples Ai <-> {0..N-1}.

    A node fixes correspondences for the first k terminals; its bound is the star
    LP with only those terminals constrained, which can only rise as more are
    added.  Nodes equal up to relabeling Z are expanded once.  ``budget`` caps
    the number of LP solves; when it runs out the best complete triple seen is
    returned as a heuristic upper bound.
    """
    boundary = tuple(boundary)
    k = len(boundary)
    full_N = default_N(boundary)
    N = full_N if N is None else N
    options = [list(enumerate_irreducible(A.n, N)) for A in boundary]
    seen: set = set()
    heap: list = [(0.0, 0, ())]
    counter = itertools.count(1)
    incumbent: tuple[float, tuple, StarLP] | None = None
    solves = 0
    exhausted = False
    while heap:
        bound, _, partial = heapq.heappop(heap)
        if incumbent is not None and bound >= incumbent[0] - tol:
            break
        level = len(partial)
        if level == k:
            break
        for R in options[level]:
            child = partial + (R,)
            key = _canonical_key(child)
            if key in seen:
                continue
            seen.add(key)
            if solves >= budget:
                exhausted = True
                break
            sol = star_lp(boundary, list(child) + [None] * (k - level - 1), N)
            solves += 1
            if incumbent is not None and sol.total >= incumbent[0] - tol:
                continue
            if level + 1 == k:
                incumbent = (sol.total, child, sol)
            heapq.heappush(heap, (sol.total, next(counter), child))
        if exhausted:
            break

    if incumbent is None:
        # nothing complete yet: fall back to the terminals themselves
        fallback = smt_star_heuristic(boundary, N, random_starts=0, max_rounds=0)
        fallback.kind = "heuristic_upper"
        fallback.lp_solves += solves
        fallback.note = "budget exhausted before any complete correspondence triple"
        return fallback
    total, corr, sol = incumbent
    legs, witnesses = star_legs(boundary, sol.z)
    kind = "heuristic_upper" if exhausted else "exact"
    note = "budget exhausted; best complete triple found so far" if exhausted else ""
    return SteinerStarReport(boundary, sol.Z, witnesses, legs, float(sum(legs)), kind, N, solves,
                             restricted=N < full_N, note=note)


# --------------------------------------------------------------------------
# interval certificate


@dataclass
class CertificateVerdict:
    status: str  # impossible | inconclusive
    legs_tested: tuple[float, float, float]
    forced_distances: tuple[float, float, float] | None = None
    violated_triangle: str | None = None
    interval_table: list[list[tuple[float, float]]] = field(default_factory=list)
    systems_surviving: int = 0
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "legs_tested": list(self.legs_tested),
            "forced_distances": None if self.forced_distances is None else list(self.forced_distances),
            "violated_triangle": self.violated_triangle,
            "interval_table": [[list(iv) for iv in row] for row in self.interval_table],
            "systems_surviving": self.systems_surviving,
            "reason": self.reason,
        }


SLOTS = ((0, 1), (0, 2), (1, 2))


def box_triangle_point(lo: Sequence[float], hi: Sequence[float]) -> tuple[float, float, float] | None:
    """A point of the box [lo, hi] (nonnegative) satisfying all triangle inequalities.

    Such a point exists iff lo_i <= hi_j + hi_k for every i; the witness clips
    each upper end to the sum of the other two.
    """
    lo = [float(v) for v in lo]
    hi = [float(v) for v in hi]
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        if lo[i] > hi[j] + hi[k]:
            return None
    return tuple(min(hi[i], hi[(i + 1) % 3] + hi[(i + 2) % 3]) for i in range(3))


def _slot_distances(A: FiniteMetricSpace, perm: Sequence[int]) -> list[float]:
    return [float(A.d[perm[p], perm[q]]) for p, q in SLOTS]


def interval_certificate(boundary: Boundary, legs: Sequence[float], tol: float = TOL) -> CertificateVerdict:
    """Try to prove that no Z has d_GH(Z, Ai) <= legs[i] for all i.

    With each leg below half the terminal's least distance, an optimal
    correspondence splits Z into three blocks per terminal, and the separation
    conditions force the three splittings to agree.  Picking one point per block,
    each of its three distances must lie within 2*leg_i of the matching distance
    of every terminal.  Every way of matching the terminals' points to the blocks
    is tried; if none leaves a box that contains a genuine triangle, no such Z
    exists.  Any unmet assumption gives ``inconclusive``.
    """
    r = tuple(float(v) for v in legs)
    boundary = tuple(boundary)
    if len(boundary) != 3 or any(A.n != 3 for A in boundary):
        return CertificateVerdict("inconclusive", r, reason="certificate needs three 3-point spaces")
    if min(r) < 0:
        return CertificateVerdict("inconclusive", r, reason="negative leg")
    sep = [min_positive_distance(A) for A in boundary]
    for i in range(3):
        if not sep[i] > 2 * r[i] + tol:
            return CertificateVerdict("inconclusive", r, reason=f"blocks of A{i + 1} may overlap")
        for j in range(3):
            if i != j and not sep[i] - 2 * r[i] > 2 * r[j] + tol:
                return CertificateVerdict("inconclusive", r,
                                          reason=f"partitions from A{i + 1} and A{j + 1} may differ")

    base = _slot_distances(boundary[0], (0, 1, 2))
    perms = list(itertools.permutations(range(3)))
    surviving = 0
    first_survivor = None
    candidate = None  # first system whose intervals all meet but no triangle fits
    for p2 in perms:
        for p3 in perms:
            rows = [base, _slot_distances(boundary[1], p2), _slot_distances(boundary[2], p3)]
            table = [[(d - 2 * r[i], d + 2 * r[i]) for d in rows[i]] for i in range(3)]
            lo = [max(table[i][s][0] for i in range(3)) for s in range(3)]
            hi = [min(table[i][s][1] for i in range(3)) for s in range(3)]
            if any(lo[s] > hi[s] + tol for s in range(3)):
                continue
            hi_t = [max(hi[s], lo[s]) for s in range(3)]
            if box_triangle_point([v - tol for v in lo], [v + tol for v in hi_t]) is not None:
                surviving += 1
                if first_survivor is None:
                    first_survivor = table
            elif candidate is None:
                candidate = (table, lo, hi_t)

    if surviving:
        return CertificateVerdict("inconclusive", r, interval_table=first_survivor,
                                  systems_surviving=surviving,
                                  reason="some block matching admits a triangle")
    verdict = CertificateVerdict("impossible", r, systems_surviving=0)
    if candidate is not None:
        table, lo, hi = candidate
        verdict.interval_table = table
        if all(hi[s] - lo[s] <= tol for s in range(3)):
            verdict.forced_distances = tuple((lo[s] + hi[s]) / 2 for s in range(3))
        for s in range(3):
            o1, o2 = [t for t in range(3) if t != s]
            if lo[s] > hi[o1] + hi[o2] + tol:
                verdict.violated_triangle = (
                    f"{_fmt(lo[s])} > {_fmt(hi[o1])} + {_fmt(hi[o2])} = {_fmt(hi[o1] + hi[o2])}")
                break
    else:
        verdict.interval_table = [[(d - 2 * r[i], d + 2 * r[i]) for d in row]
                                  for i, row in enumerate([base] + [_slot_distances(A, (0, 1, 2))
                                                                    for A in boundary[1:]])]
        verdict.reason = "no block matching has overlapping intervals"
    return verdict


def _fmt(v: float) -> str:
    return f"{v:.12g}"


@dataclass(frozen=True)
class LowerBound:
    value: float
    mf_total: float
    certified_gap: bool  # True when the certificate pushed the bound above mf
    pairwise: tuple[float, float, float]


def certified_smt_lower_bound(boundary: Boundary, tol: float = 1e-6,
                              pairwise: tuple[float, float, float] | None = None) -> LowerBound:
    """Largest L (to ``tol``) such that every leg triple of sum <= L is refuted.

    A leg triple of a star satisfies r_i + r_j >= d_GH(Ai, Aj), so with sum <= L
    each r_i is at most L - d_GH(Aj, Ak).  Refutation is monotone in the legs,
    so refuting that corner refutes the whole set.
    """
    d = pairwise if pairwise is not None else pairwise_gh(boundary)
    mf = sum(d) / 2

    def refuted(L: float) -> bool:
        corner = tuple(max(0.0, L - d[i]) for i in range(3))
        return interval_certificate(boundary, corner).status == "impossible"

    if not refuted(mf):
        return LowerBound(mf, mf, False, tuple(d))
    lo = mf
    step = max(mf, 1.0)
    hi = mf + step
    while refuted(hi):
        lo, hi = hi, hi + step
        step *= 2
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if refuted(mid):
            lo = mid
        else:
            hi = mid
    return LowerBound(lo, mf, lo > mf, tuple(d))




def _system_rows(rows: list[list[float]]) -> tuple[list[np.ndarray], list[float]]:
    """Linear constraints on legs r under which one block matching survives.

    ``rows[i][s]`` is terminal i's distance in slot s.  Survival means every slot's
    intervals meet, and lo_a <= hi_b + hi_c for each slot a, i.e.
    d_a^i - 2r_i <= d_b^j + 2r_j + d_c^k + 2r_k for all i, j, k.
    """
    A, b = [], []
    for s in range(3):
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                row = np.zeros(3)
                row[i] -= 2.0
                row[j] -= 2.0
                A.append(row)
                b.append(rows[j][s] - rows[i][s])
    for a in range(3):
        bb, cc = [t for t in range(3) if t != a]
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    row = np.zeros(3)
                    row[i] -= 2.0
                    row[j] -= 2.0
                    row[k] -= 2.0
                    A.append(row)
                    b.append(rows[j][bb] + rows[k][cc] - rows[i][a])
    return A, b


def _pieces(boundary: Boundary):
    """Polyhedra in leg space covering every leg triple the certificate cannot refute."""
    sep = [min_positive_distance(A) for A in boundary]
    for i in range(3):
        row = np.zeros(3)
        row[i] = -2.0
        yield f"blocks of A{i + 1} may overlap", [row], [-sep[i]]
        for j in range(3):
            if j != i:
                row = np.zeros(3)
                row[i] = row[j] = -2.0
                yield f"partitions of A{i + 1}, A{j + 1} may differ", [row], [-sep[i]]
    base = _slot_distances(boundary[0], (0, 1, 2))
    for p2 in itertools.permutations(range(3)):
        for p3 in itertools.permutations(range(3)):
            rows = [base, _slot_distances(boundary[1], p2), _slot_distances(boundary[2], p3)]
            A, b = _system_rows(rows)
            yield f"matching {p2} {p3} survives", A, b


def refined_smt_lower_bound(boundary: Boundary,
                            pairwise: tuple[float, float, float] | None = None) -> LowerBound:
    """Infimum of r1 + r2 + r3 over leg triples the certificate cannot refute.

    The certificate is inconclusive exactly on a union of polyhedra (a failed
    separation condition, or one surviving block matching), so the infimum is
    the least of small LPs, one per polyhedron, each also requiring
    r_i + r_j >= d_GH(Ai, Aj).  Every star of smaller length is refuted, so this
    is a lower bound on the Steiner star length, and it dominates the corner bound.
    """
    d = pairwise if pairwise is not None else pairwise_gh(boundary)
    mf = sum(d) / 2
    boundary = tuple(boundary)
    if len(boundary) != 3 or any(A.n != 3 for A in boundary):
        return LowerBound(mf, mf, False, tuple(d))
    pair_rows, pair_b = [], []
    for k in range(3):
        row = np.zeros(3)
        row[[t for t in range(3) if t != k]] = -1.0
        pair_rows.append(row)
        pair_b.append(-d[k])
    best = np.inf
    for _, A, b in _pieces(boundary):
        res = simplex(np.ones(3), np.array(A + pair_rows), np.array(b + pair_b))
        if res.ok:
            best = min(best, res.fun)
    return LowerBound(max(mf, best), mf, best > mf + 1e-9, tuple(d))
