"""Relations and correspondences between two finite index sets.

A relation is a dense boolean ``m x n`` incidence matrix.  A correspondence is a
relation whose rows and columns are all nonempty; it is irreducible when it is
minimal under inclusion, which holds iff every pair has an endpoint of
multiplicity one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .metric import FiniteMetricSpace


class CorrespondenceError(ValueError):
    pass


class Relation:
    __slots__ = ("pairs", "_key")

    def __init__(self, pairs):
        p = np.array(pairs, dtype=bool)
        if p.ndim != 2 or p.size == 0:
            raise CorrespondenceError(f"incidence matrix must be 2-d and nonempty, got {p.shape}")
        if not p.any():
            raise CorrespondenceError("relation has no pairs")
        p.setflags(write=False)
        self.pairs = p
        self._key: str | None = None

    @classmethod
    def from_pairs(cls, m: int, n: int, pairs) -> "Relation":
        a = np.zeros((m, n), dtype=bool)
        for i, j in pairs:
            a[i, j] = True
        return cls(a)

    @property
    def m(self) -> int:
        return self.pairs.shape[0]

    @property
    def n(self) -> int:
        return self.pairs.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pairs.shape

    def pair_list(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in np.argwhere(self.pairs)]

    def __len__(self) -> int:
        return int(self.pairs.sum())

    def key(self) -> str:
        """Canonical encoding: the row-major bit string of the incidence matrix."""
        if self._key is None:
            self._key = "".join("1" if b else "0" for b in self.pairs.ravel())
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Relation) and self.shape == other.shape and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.shape, self.key()))

    def __le__(self, other: "Relation") -> bool:
        return self.shape == other.shape and not np.any(self.pairs & ~other.pairs)

    def transpose(self):
        return type(self)(self.pairs.T)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.m}x{self.n}, {self.pair_list()})"


class Correspondence(Relation):
    __slots__ = ("row_mult", "col_mult")

    def __init__(self, pairs):
        super().__init__(pairs)
        self.row_mult = self.pairs.sum(axis=1)
        self.col_mult = self.pairs.sum(axis=0)
        if not (self.row_mult.all() and self.col_mult.all()):
            raise CorrespondenceError("relation is not a correspondence (empty row or column)")


def is_correspondence(rel: Relation) -> bool:
    p = rel.pairs
    return bool(p.any(axis=1).all() and p.any(axis=0).all())


def as_correspondence(rel: Relation) -> Correspondence:
    return rel if isinstance(rel, Correspondence) else Correspondence(rel.pairs)


def distortion(rel: Relation, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    if rel.shape != (X.n, Y.n):
        raise CorrespondenceError(f"relation shape {rel.shape} does not match spaces ({X.n}, {Y.n})")
    ii, jj = np.nonzero(rel.pairs)
    diff = np.abs(X.d[np.ix_(ii, ii)] - Y.d[np.ix_(jj, jj)])
    return float(diff.max())


def is_irreducible(R: Relation) -> bool:
    R = as_correspondence(R)
    ii, jj = np.nonzero(R.pairs)
    return bool(np.all(np.minimum(R.row_mult[ii], R.col_mult[jj]) == 1))


def reduce_to_irreducible(R: Relation) -> Correspondence:
    """An irreducible sub-correspondence of ``R``.

    Follows the constructive argument: pick a map f: X -> Y inside R, cover the
    columns it misses with g: Y2 -> X, and thin h = f + g^-1 on the columns that
    f sends from g's image.  Every free choice takes the smallest index.
    """
    R = as_correspondence(R)
    p = R.pairs
    m, n = p.shape
    f = p.argmax(axis=1)  # smallest column in each row
    y1 = np.zeros(n, dtype=bool)
    y1[f] = True
    y2 = np.flatnonzero(~y1)
    g = {int(y): int(p[:, y].argmax()) for y in y2}
    x2 = np.zeros(m, dtype=bool)
    x2[list(g.values())] = True

    h = np.zeros_like(p)
    h[np.arange(m), f] = True
    for y, x in g.items():
        h[x, y] = True

    for y in sorted({int(f[x]) for x in np.flatnonzero(x2)}):
        pre = np.flatnonzero(h[:, y])
        if np.any(~x2[pre]):
            h[pre[x2[pre]], y] = False
        else:
            h[pre[1:], y] = False
    return Correspondence(h)


@dataclass(frozen=True)
class IrreducibleDecomposition:
    """Six-part partition induced by an irreducible correspondence.

    ``blocks_of_x1p`` maps each multi-column ``y`` in ``y2`` to its preimage block
    (a subset of ``x1p``); ``blocks_of_y1p`` maps each multi-row ``x`` in ``x2`` to
    its image block.  ``matching`` is the bijection ``x1pp -> y1pp``.
    """

    m: int
    n: int
    x1p: tuple[int, ...]
    x1pp: tuple[int, ...]
    x2: tuple[int, ...]
    y1p: tuple[int, ...]
    y1pp: tuple[int, ...]
    y2: tuple[int, ...]
    blocks_of_x1p: dict[int, tuple[int, ...]]
    blocks_of_y1p: dict[int, tuple[int, ...]]
    matching: dict[int, int]

    def reassemble(self) -> Correspondence:
        a = np.zeros((self.m, self.n), dtype=bool)
        for y, block in self.blocks_of_x1p.items():
            a[list(block), y] = True
        for x, block in self.blocks_of_y1p.items():
            a[x, list(block)] = True
        for x, y in self.matching.items():
            a[x, y] = True
        return Correspondence(a)


def decompose(R: Relation) -> IrreducibleDecomposition:
    R = as_correspondence(R)
    if not is_irreducible(R):
        raise CorrespondenceError("decompose needs an irreducible correspondence")
    p = R.pairs
    m, n = p.shape
    x2 = tuple(int(i) for i in np.flatnonzero(R.row_mult >= 2))
    y2 = tuple(int(j) for j in np.flatnonzero(R.col_mult >= 2))
    blocks_x = {y: tuple(int(i) for i in np.flatnonzero(p[:, y])) for y in y2}
    blocks_y = {x: tuple(int(j) for j in np.flatnonzero(p[x])) for x in x2}
    x1p = tuple(sorted(i for b in blocks_x.values() for i in b))
    y1p = tuple(sorted(j for b in blocks_y.values() for j in b))
    x1pp = tuple(i for i in range(m) if i not in x2 and i not in x1p)
    y1pp = tuple(j for j in range(n) if j not in y2 and j not in y1p)
    matching = {x: int(np.flatnonzero(p[x])[0]) for x in x1pp}
    return IrreducibleDecomposition(m, n, x1p, x1pp, x2, y1p, y1pp, y2, blocks_x, blocks_y, matching)


def _subsets_by_rank(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All subsets, by size then lexicographically."""
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def restricted_growth_strings(n: int, k: int, min_block: int = 1) -> Iterator[tuple[int, ...]]:
    """Partitions of ``range(n)`` into exactly ``k`` blocks, as restricted growth strings.

    ``s[0] = 0`` and ``s[i] <= 1 + max(s[:i])``; yielded in lexicographic order.
    """
    if k == 0:
        if n == 0:
            yield ()
        return
    if n < k * min_block:
        return
    s = [0] * n
    sizes = [0] * k

    def rec(i: int, top: int):
        if i == n:
            if top == k - 1 and all(c >= min_block for c in sizes):
                yield tuple(s)
            return
        remaining = n - i
        # blocks still to open, and shortfall of blocks already open
        need = (k - 1 - top) * min_block + sum(max(0, min_block - sizes[b]) for b in range(top + 1))
        if need > remaining:
            return
        for b in range(min(top + 2, k)):
            s[i] = b
            sizes[b] += 1
            yield from rec(i + 1, max(top, b))
            sizes[b] -= 1

    s[0] = 0
    sizes[0] = 1
    yield from rec(1, 0)


def _labeled_partitions(items: Sequence[int], labels: Sequence[int]) -> Iterator[dict[int, tuple[int, ...]]]:
    """Partitions of ``items`` into blocks of size >= 2, blocks bijectively labeled."""
    k = len(labels)
    for rgs in restricted_growth_strings(len(items), k, min_block=2):
        blocks = [tuple(items[i] for i in range(len(items)) if rgs[i] == b) for b in range(k)]
        for perm in itertools.permutations(range(k)):
            yield {labels[perm[b]]: blocks[b] for b in range(k)}


def enumerate_irreducible(m: int, n: int) -> Iterator[Correspondence]:
    """Every irreducible correspondence between ``range(m)`` and ``range(n)``, once each.

    Generated from the decomposition: choose the multi-rows ``x2`` and multi-columns
    ``y2``, then the blocks they own, then a bijection between what is left.
    """
    if m < 1 or n < 1:
        raise CorrespondenceError("sizes must be positive")
    X = range(m)
    Y = range(n)
    for x2 in _subsets_by_rank(X):
        rest_x = [i for i in X if i not in x2]
        for y2 in _subsets_by_rank(Y):
            rest_y = [j for j in Y if j not in y2]
            if len(rest_x) < 2 * len(y2) or len(rest_y) < 2 * len(x2):
                continue
            # |x1''| = |x| - |x2| - |x1'| must equal |y1''|
            for x1p in _subsets_by_rank(rest_x):
                if len(x1p) < 2 * len(y2) or (len(y2) == 0 and x1p):
                    continue
                x1pp = [i for i in rest_x if i not in x1p]
                size_y1p = len(rest_y) - len(x1pp)
                if size_y1p < 2 * len(x2) or (len(x2) == 0 and size_y1p):
                    continue
                for y1p in itertools.combinations(rest_y, size_y1p):
                    y1pp = [j for j in rest_y if j not in y1p]
                    for bx in _labeled_partitions(list(x1p), list(y2)):
                        for by in _labeled_partitions(list(y1p), list(x2)):
                            for perm in itertools.permutations(y1pp):
                                a = np.zeros((m, n), dtype=bool)
                                for y, block in bx.items():
                                    a[list(block), y] = True
                                for x, block in by.items():
                                    a[x, list(block)] = True
                                a[x1pp, list(perm)] = True
                                yield Correspondence(a)


ALL_CORRESPONDENCE_GUARD = 20


def enumerate_all_correspondences(m: int, n: int, guard: int = ALL_CORRESPONDENCE_GUARD) -> Iterator[Correspondence]:
    """Every correspondence on an ``m x n`` grid, in increasing bitmask order."""
    if m * n > guard:
        raise CorrespondenceError(f"m*n = {m * n} exceeds the enumeration guard {guard}")
    cells = m * n
    weights = 1 << np.arange(cells, dtype=np.int64)
    row_masks = [sum(1 << (i * n + j) for j in range(n)) for i in range(m)]
    col_masks = [sum(1 << (i * n + j) for i in range(m)) for j in range(n)]
    for mask in range(1, 1 << cells):
        if all(mask & r for r in row_masks) and all(mask & c for c in col_masks):
            bits = (mask & weights) != 0
            yield Correspondence(bits.reshape(m, n))


def count_correspondences(m: int, n: int) -> int:
    """Number of correspondences by inclusion-exclusion over empty columns."""
    from math import comb

    return sum((-1) ** k * comb(n, k) * (2 ** (n - k) - 1) ** m for k in range(n + 1))
