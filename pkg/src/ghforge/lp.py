"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves  min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0  for the small
problems that come up here (tens of variables, up to about a thousand rows).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = 1e-9


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    x: np.ndarray | None
    fun: float
    duals_ub: np.ndarray | None = None
    duals_eq: np.ndarray | None = None
    iterations: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _pivot(T: np.ndarray, r: int, c: int):
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T: np.ndarray, basis: np.ndarray, ncols: int, max_iter: int, eps: float) -> tuple[str, int]:
    """Minimize the objective held in the last row of ``T`` over columns ``< ncols``."""
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        red = T[m, :ncols]
        neg = np.flatnonzero(red < -eps)
        if neg.size == 0:
            return "optimal", it
        c = int(neg[0])  # Bland: lowest index entering
        col = T[:m, c]
        pos = col > eps
        if not pos.any():
            return "unbounded", it
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + eps * max(1.0, abs(best)))
        r = int(ties[np.argmin(basis[ties])])  # Bland: lowest index leaving
        _pivot(T, r, c)
        basis[r] = c
        it += 1
    return "iteration_limit", it


def simplex(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_iter: int = 50_000,
            eps: float = EPS) -> LPResult:
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, nv)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, nv)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    mu, me = A_ub.shape[0], A_eq.shape[0]
    m = mu + me

    # standard form: [A_ub I; A_eq 0] [x; s] = b, rows flipped so b >= 0
    A = np.zeros((m, nv + mu))
    A[:mu, :nv] = A_ub
    A[:mu, nv:] = np.eye(mu)
    A[mu:, :nv] = A_eq
    b = np.concatenate([b_ub, b_eq])
    sign = np.where(b < 0, -1.0, 1.0)
    As = A * sign[:, None]
    bs = b * sign
    n_std = nv + mu

    # slack columns that stayed +1 can start in the basis; other rows get artificials
    basis = np.full(m, -1)
    for i in range(mu):
        if sign[i] > 0:
            basis[i] = nv + i
    need = np.flatnonzero(basis < 0)
    na = need.size
    T = np.zeros((m + 1, n_std + na + 1))
    T[:m, :n_std] = As
    T[:m, -1] = bs
    for k, i in enumerate(need):
        T[i, n_std + k] = 1.0
        basis[i] = n_std + k
    iters = 0

    if na:
        # phase 1: minimize the sum of artificials
        T[m, :] = 0.0
        T[m, n_std:n_std + na] = 1.0
        for i in need:
            T[m] -= T[i]
        status, it = _run(T, basis, n_std + na, max_iter, eps)
        iters += it
        if status != "optimal":
            return LPResult(status, None, np.nan, iterations=iters)
        if -T[m, -1] > eps * max(1.0, np.abs(bs).max(initial=0.0)) * 10:
            return LPResult("infeasible", None, np.nan, iterations=iters)
        # drive remaining artificials out of the basis
        for r in range(m):
            if basis[r] >= n_std:
                cand = np.flatnonzero(np.abs(T[r, :n_std]) > eps)
                if cand.size:
                    _pivot(T, r, int(cand[0]))
                    basis[r] = int(cand[0])
        keep = basis < n_std  # redundant rows keep an artificial at zero
        T = np.delete(T, np.arange(n_std, n_std + na), axis=1)
        T = np.vstack([T[:m][keep], T[m:]])
        basis = basis[keep]
        m = basis.size

    cost = np.zeros(n_std)
    cost[:nv] = c
    T[m, :] = 0.0
    T[m, :n_std] = cost
    for r in range(m):
        T[m] -= cost[basis[r]] * T[r]
    status, it = _run(T, basis, n_std, max_iter - iters, eps)
    iters += it
    if status != "optimal":
        return LPResult(status, None, np.nan, iterations=iters)

    xs = np.zeros(n_std)
    xs[basis] = T[:m, -1]
    x = xs[:nv]
    # duals from B^T y = c_B on the unflipped rows that survived phase 1
    rows = np.flatnonzero(keep) if na else np.arange(mu + me)
    y = np.zeros(mu + me)
    B = A[np.ix_(rows, basis)]
    try:
        y[rows] = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        y[rows] = np.linalg.lstsq(B.T, cost[basis], rcond=None)[0]
    return LPResult("optimal", x, float(c @ x), y[:mu], y[mu:], iters)

