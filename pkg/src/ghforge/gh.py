"""Exact Gromov-Hausdorff distance between finite metric spaces.

Three interchangeable exact methods (brute force over every correspondence,
enumeration of irreducible correspondences, and branch-and-bound) plus closed
forms for spaces with at most three points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .correspondence import (
    ALL_CORRESPONDENCE_GUARD,
    Correspondence,
    distortion,
    enumerate_irreducible,
)
from .metric import (
    TOL,
    DistanceTriple,
    FiniteMetricSpace,
    MetricError,
    diameter,
    min_positive_distance,
    sorted_distance_triple,
)

IRREDUCIBLE_NODE_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GHResult:
    value: float
    witness: Correspondence
    method: str
    nodes_explored: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness_pairs": [list(p) for p in self.witness.pair_list()],
            "method": self.method,
            "nodes": self.nodes_explored,
        }


def _cell_costs(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> np.ndarray:
    """cost[(i,j), (k,l)] = | |x_i x_k| - |y_j y_l| | over row-major cells."""
    m, n = X.n, Y.n
    c = np.abs(X.d[:, None, :, None] - Y.d[None, :, None, :])
    return c.reshape(m * n, m * n)


def _pick_witness(masks: np.ndarray, m: int, n: int) -> Correspondence:
    # smallest row-major bit string = largest cell-0-first pattern of zeros
    cells = m * n
    bits = ((masks[:, None] >> np.arange(cells)) & 1).astype(bool)
    keys = ["".join("1" if b else "0" for b in row) for row in bits]
    best = min(range(len(keys)), key=keys.__getitem__)
    return Correspondence(bits[best].reshape(m, n))


def gh_oracle(X: FiniteMetricSpace, Y: FiniteMetricSpace, guard: int = ALL_CORRESPONDENCE_GUARD,
              chunk: int = 1 << 14) -> GHResult:
    """Minimum of half the distortion over every correspondence (brute force)."""
    m, n = X.n, Y.n
    cells = m * n
    if cells > guard:
        raise BudgetExceeded(f"oracle guard: m*n = {cells} > {guard}")
    cost = _cell_costs(X, Y)
    shifts = np.arange(cells, dtype=np.int64)
    best = np.inf
    best_masks: list[np.ndarray] = []
    total = (1 << cells) - 1
    for start in range(1, total + 1, chunk):
        masks = np.arange(start, min(start + chunk, total + 1), dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(bool)
        grid = bits.reshape(-1, m, n)
        ok = grid.any(axis=2).all(axis=1) & grid.any(axis=1).all(axis=1)
        if not ok.any():
            continue
        masks, bits = masks[ok], bits[ok]
        bf = bits.astype(float)
        dis = np.zeros(len(masks))
        for c in range(cells):
            row = (bf * cost[c]).max(axis=1)
            np.maximum(dis, np.where(bits[:, c], row, 0.0), out=dis)
        lo = dis.min()
        if lo < best - TOL:
            best = lo
            best_masks = [masks[dis <= lo + TOL]]
        elif lo <= best + TOL:
            best_masks.append(masks[dis <= best + TOL])
    witness = _pick_witness(np.concatenate(best_masks), m, n)
    return GHResult(distortion(witness, X, Y) / 2, witness, "oracle", total)


def gh_irreducible(X: FiniteMetricSpace, Y: FiniteMetricSpace,
                   budget: int = IRREDUCIBLE_NODE_BUDGET) -> GHResult:
    """Minimum of half the distortion over irreducible correspondences only."""
    best = np.inf
    best_key = None
    witness = None
    count = 0
    for R in enumerate_irreducible(X.n, Y.n):
        count += 1
        if count > budget:
            raise BudgetExceeded(f"irreducible enumeration exceeded {budget} correspondences")
        dis = distortion(R, X, Y)
        if dis < best - TOL or (dis <= best + TOL and R.key() < best_key):
            if dis < best - TOL:
                best = dis
            best_key = R.key()
            witness = R
    return GHResult(distortion(witness, X, Y) / 2, witness, "irreducible", count)


class _BranchAndBound:
    """Depth-first search assigning each row a nonempty set of columns.

    Irreducibility is enforced on the fly: a row taking several columns needs
    them all unused and locks them; a row taking a single column cannot share a
    locked column.  The partial distortion only grows as pairs are added, so it
    is an admissible bound, sharpened by a one-step lookahead over unassigned
    rows and uncovered columns.
    """

    def __init__(self, dx: np.ndarray, dy: np.ndarray, upper: float = np.inf):
        self.dx = dx
        self.dy = dy
        self.m = dx.shape[0]
        self.n = dy.shape[0]
        self.order = list(np.argsort(-dx.max(axis=1), kind="stable"))
        self.best = upper
        self.best_assignment: list[tuple[int, tuple[int, ...]]] | None = None
        self.nodes = 0

    def run(self):
        self.col_count = np.zeros(self.n, dtype=int)
        self.col_locked = np.zeros(self.n, dtype=bool)
        self.ax: list[int] = []
        self.ay: list[int] = []
        self.assignment: list[tuple[int, tuple[int, ...]]] = []
        self._search(0, 0.0)
        return self.best, self.best_assignment

    def _increments(self, rows: list[int]) -> np.ndarray:
        """inc[r, y]: largest distortion term between (rows[r], y) and the assigned pairs."""
        if not self.ax:
            return np.zeros((len(rows), self.n))
        a = self.dx[np.ix_(rows, self.ax)]
        b = self.dy[:, self.ay]
        return np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)

    def _search(self, depth: int, cur: float):
        self.nodes += 1
        if depth == self.m:
            if not self.col_count.all():
                return
            if cur < self.best:
                self.best = cur
                self.best_assignment = list(self.assignment)
            return
        rest = self.order[depth:]
        inc = self._increments(rest)
        free = ~self.col_locked
        # every remaining row needs a usable column, every uncovered column a row
        per_row = np.where(free[None, :], inc, np.inf).min(axis=1)
        bound = max(cur, float(per_row.max()))
        uncovered = self.col_count == 0
        if uncovered.any():
            bound = max(bound, float(inc[:, uncovered].min(axis=0).max()))
        if bound >= self.best:
            return
        x = rest[0]
        row_inc = np.maximum(inc[0], cur)
        last = depth == self.m - 1
        for cost, cols in self._candidates(x, row_inc, last):
            if cost >= self.best:
                break
            self._push(x, cols)
            self._search(depth + 1, cost)
            self._pop(x, cols)

    def _candidates(self, x: int, row_inc: np.ndarray, last: bool):
        best = self.best
        uncovered = np.flatnonzero(self.col_count == 0)
        out: list[tuple[float, int, tuple[int, ...]]] = []
        if last and len(uncovered) >= 2:
            cols = tuple(int(j) for j in uncovered)
            cost = max(float(row_inc[uncovered].max()), float(self.dy[np.ix_(uncovered, uncovered)].max()))
            return [(cost, cols)] if cost < best else []
        if last and len(uncovered) == 1:
            j = int(uncovered[0])
            return [(float(row_inc[j]), (j,))]
        for j in range(self.n):
            if not self.col_locked[j] and row_inc[j] < best:
                out.append((float(row_inc[j]), 1, (j,)))
        if not last:
            unused = [int(j) for j in uncovered if row_inc[j] < best]
            dy = self.dy

            def grow(start: int, chosen: list[int], cost: float):
                for t in range(start, len(unused)):
                    j = unused[t]
                    c = max(cost, float(row_inc[j]))
                    for i in chosen:
                        c = max(c, float(dy[i, j]))
                    if c >= best:
                        continue
                    chosen.append(j)
                    if len(chosen) >= 2:
                        out.append((c, len(chosen), tuple(chosen)))
                    grow(t + 1, chosen, c)
                    chosen.pop()

            grow(0, [], 0.0)
        out.sort()
        return [(c, cols) for c, _, cols in out]

    def _push(self, x: int, cols: tuple[int, ...]):
        for j in cols:
            self.col_count[j] += 1
            self.ax.append(x)
            self.ay.append(j)
        if len(cols) > 1:
            self.col_locked[list(cols)] = True
        self.assignment.append((x, cols))

    def _pop(self, x: int, cols: tuple[int, ...]):
        for j in cols:
            self.col_count[j] -= 1
            self.ax.pop()
            self.ay.pop()
        if len(cols) > 1:
            self.col_locked[list(cols)] = False
        self.assignment.pop()


def gh_branch_and_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace, upper: float = np.inf) -> GHResult:
    """Exact GH distance by branch-and-bound over irreducible correspondences.

    ``upper`` is an optional known bound on the distortion (not the distance);
    when no correspondence beats it the result is still exact only if the bound
    itself was attained, so callers normally leave it infinite.
    """
    swap = X.n < Y.n
    dx, dy = (Y.d, X.d) if swap else (X.d, Y.d)
    solver = _BranchAndBound(np.asarray(dx), np.asarray(dy), upper)
    best, assignment = solver.run()
    if assignment is None:
        raise BudgetExceeded("no correspondence beats the supplied upper bound")
    a = np.zeros((dx.shape[0], dy.shape[0]), dtype=bool)
    for x, cols in assignment:
        a[x, list(cols)] = True
    R = Correspondence(a.T if swap else a)
    return GHResult(distortion(R, X, Y) / 2, R, "branch_and_bound", solver.nodes)


def gh_three_point(t1: DistanceTriple, t2: DistanceTriple, tol: float = TOL) -> float:
    """Half the largest difference between matching sorted side lengths."""
    for t in (t1, t2):
        a, b, c = t
        if not (0 < a <= b <= c) or c > a + b + tol:
            raise MetricError(f"{t} is not a sorted metric triple")
    return 0.5 * max(abs(p - q) for p, q in zip(t1, t2))


def _sorted_vertex_order(space: FiniteMetricSpace) -> list[int]:
    """Vertices ordered so the k-th is opposite the k-th shortest side."""
    d = space.d
    opposite = [float(d[1, 2]), float(d[0, 2]), float(d[0, 1])]
    return sorted(range(3), key=lambda k: (opposite[k], k))


def gh_closed_form(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> GHResult:
    """Closed forms for a one-point side, two 2-point spaces, or two 3-point spaces."""
    m, n = X.n, Y.n
    if m == 1 or n == 1:
        R = Correspondence(np.ones((m, n), dtype=bool))
    elif m == n == 2:
        R = Correspondence(np.eye(2, dtype=bool))
    elif m == n == 3:
        a = np.zeros((3, 3), dtype=bool)
        for i, j in zip(_sorted_vertex_order(X), _sorted_vertex_order(Y)):
            a[i, j] = True
        R = Correspondence(a)
        value = gh_three_point(sorted_distance_triple(X), sorted_distance_triple(Y))
        return GHResult(value, R, "closed_form", 0)
    else:
        raise ValueError(f"no closed form for sizes ({m}, {n})")
    return GHResult(distortion(R, X, Y) / 2, R, "closed_form", 0)


def has_closed_form(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> bool:
    m, n = X.n, Y.n
    return m == 1 or n == 1 or (m == n and m in (2, 3) and X.mode == Y.mode == "metric")


def gh_lower_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """Cheap admissible lower bound on the GH distance.

    Uses the diameter gap, and the separation gap: equal sizes force either a
    bijection or a pair sharing an endpoint on both sides, and unequal sizes
    force two points of the larger side onto one partner.
    """
    bound = 0.5 * abs(diameter(X) - diameter(Y))
    m, n = X.n, Y.n
    if m == n and m >= 2:
        bound = max(bound, 0.5 * abs(min_positive_distance(X) - min_positive_distance(Y)))
    elif m > n and m >= 2:
        bound = max(bound, 0.5 * min_positive_distance(X))
    elif n > m and n >= 2:
        bound = max(bound, 0.5 * min_positive_distance(Y))
    return bound


METHODS = {
    "oracle": gh_oracle,
    "irreducible": gh_irreducible,
    "bnb": gh_branch_and_bound,
    "branch_and_bound": gh_branch_and_bound,
}


def gh_distance(X: FiniteMetricSpace, Y: FiniteMetricSpace, method: str = "auto") -> GHResult:
    if method == "auto":
        if has_closed_form(X, Y):
            return gh_closed_form(X, Y)
        return gh_branch_and_bound(X, Y)
    if method == "closed_form":
        return gh_closed_form(X, Y)
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None
    return fn(X, Y)


def gh_value(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    return gh_distance(X, Y).value


def all_bijections(n: int):
    for perm in itertools.permutations(range(n)):
        yield Correspondence(np.eye(n, dtype=bool)[list(perm)])
