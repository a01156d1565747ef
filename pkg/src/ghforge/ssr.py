"""Random search for boundaries with a small minimal-filling to Steiner-tree ratio."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .metric import TOL, FiniteMetricSpace, MetricError, new_space
from .steiner import (
    certified_smt_lower_bound,
    mf_three_point,
    pairwise_gh,
    refined_smt_lower_bound,
    smt_star_heuristic,
)

FAMILIES = ("near_violation", "uniform")


@dataclass
class SearchConfig:
    seeds: list[int] = field(default_factory=lambda: list(range(1000)))
    family: str = "near_violation"
    side_range: tuple[float, float] = (4.0, 20.0)  # shortest side of the centre triple
    spread_range: tuple[float, float] = (0.5, 3.0)  # max-norm radius around the centre
    random_starts: int = 2
    N: int | None = None
    workers: int = 1


@dataclass(frozen=True)
class SubratioRecord:
    seed: int
    boundary: tuple[tuple[float, float, float], ...]  # (|x0x1|, |x0x2|, |x1x2|) per terminal
    mf: float
    smt_upper: float
    smt_lower: float
    ratio_upper: float  # mf / smt_lower
    smt_lower_refined: float
    ratio_upper_refined: float

    @property
    def ratio_lower(self) -> float:
        return self.mf / self.smt_upper if self.smt_upper > 0 else 1.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["boundary"] = [list(t) for t in self.boundary]
        d["ratio_lower"] = self.ratio_lower
        return d


def triangle(xy: float, xz: float, yz: float) -> FiniteMetricSpace:
    return new_space([[0, xy, xz], [xy, 0, yz], [xz, yz, 0]])


def sample_boundary(rng: np.random.Generator, config: SearchConfig) -> tuple[FiniteMetricSpace, ...]:
    """Three random triangles from ``config.family``.

    ``near_violation`` places the terminals around a distance triple that breaks
    the triangle inequality, one terminal at each extreme of every coordinate,
    so that the triangles sit pairwise at max-norm distance twice the radius.
    ``uniform`` draws each side independently from ``side_range``.
    """
    lo, hi = config.side_range
    for _ in range(10_000):
        if config.family == "uniform":
            sides = rng.uniform(lo, hi, size=(3, 3))
        elif config.family == "near_violation":
            a = rng.uniform(lo, hi)
            b = rng.uniform(a, a + (hi - lo))
            rho = rng.uniform(*config.spread_range)
            centre = np.array([a + b + rng.uniform(0, 2 * rho), b, a])
            sig = rng.uniform(-1, 1, size=(3, 3))
            for j in range(3):
                p = rng.permutation(3)
                sig[p[0], j], sig[p[1], j] = 1.0, -1.0
            sides = centre + rho * sig
        else:
            raise ValueError(f"unknown family {config.family!r}")
        try:
            return tuple(triangle(*s) for s in sides)
        except MetricError:
            continue
    raise RuntimeError("could not sample a valid boundary")


def evaluate_boundary(boundary, seed: int = 0, random_starts: int = 2, N: int | None = None) -> SubratioRecord:
    d = pairwise_gh(boundary)
    mf = mf_three_point(*d).total
    lower = certified_smt_lower_bound(boundary, pairwise=d).value
    refined = refined_smt_lower_bound(boundary, pairwise=d).value
    upper = smt_star_heuristic(boundary, N=N, seed=seed, random_starts=random_starts).total
    tri = tuple((float(A.d[0, 1]), float(A.d[0, 2]), float(A.d[1, 2])) for A in boundary)
    return SubratioRecord(seed, tri, mf, upper, lower, _ratio(mf, lower), refined, _ratio(mf, refined))


def _ratio(mf: float, smt: float) -> float:
    return mf / smt if smt > TOL else 1.0


def _run_seed(args) -> SubratioRecord:
    seed, config = args
    rng = np.random.default_rng(seed)
    boundary = sample_boundary(rng, config)
    return evaluate_boundary(boundary, seed, config.random_starts, config.N)


def iter_records(config: SearchConfig) -> Iterator[SubratioRecord]:
    """Records in seed order; worker count never changes the values."""
    jobs = [(s, config) for s in config.seeds]
    if config.workers <= 1:
        yield from map(_run_seed, jobs)
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        yield from pool.map(_run_seed, jobs, chunksize=8)


def subratio_search(config: SearchConfig) -> list[SubratioRecord]:
    """All records, sorted by certified ratio bound ascending (ties by seed)."""
    records = list(iter_records(config))
    records.sort(key=lambda r: (r.ratio_upper, r.seed))
    return records


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("GH_FORGE_THREADS", "1")))
    except ValueError:
        return 1


def parse_seeds(text: str) -> list[int]:
    """``"0..999"`` (inclusive), ``"5"`` or ``"1,2,7"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def summarize(records: Iterable[SubratioRecord]) -> dict:
    records = list(records)
    best = min(records, key=lambda r: (r.ratio_upper, r.seed))
    best_refined = min(records, key=lambda r: (r.ratio_upper_refined, r.seed))
    return {
        "count": len(records),
        "min_ratio_upper": best.ratio_upper,
        "argmin_seed": best.seed,
        "min_ratio_upper_refined": best_refined.ratio_upper_refined,
        "argmin_seed_refined": best_refined.seed,
        "below_0.857": sum(r.ratio_upper < 0.857 for r in records),
        "below_0.857_refined": sum(r.ratio_upper_refined < 0.857 for r in records),
    }
