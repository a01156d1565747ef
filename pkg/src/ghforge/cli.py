"""Command-line entry point: ``gh <command> ...``.

Exit status is 0 on success, 1 on bad input (missing file, parse or validation
failure) and 2 when a search budget ran out; partial results are still written
and labeled.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .cone import gh_via_cone, in_closed_cone, is_strict, linf_star_optimum, nu
from .correspondence import CorrespondenceError, enumerate_all_correspondences, enumerate_irreducible
from .fileio import InputError, dumps, load_space, load_triple
from .gh import BudgetExceeded, gh_distance
from .metric import TOL, MetricError
from .ssr import SearchConfig, default_workers, iter_records, parse_seeds, summarize
from .steiner import (
    certified_smt_lower_bound,
    default_N,
    interval_certificate,
    mf_boundary,
    pairwise_gh,
    refined_smt_lower_bound,
    smt_star_exact,
    smt_star_heuristic,
)

COMMANDS = ("dist", "enumerate", "cone", "mf", "smt", "certify", "ssr-search")


@dataclass
class RunConfig:
    command: str
    tolerance: float = TOL
    seed: int = 0
    budgets: dict = field(default_factory=dict)
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        for k, v in self.budgets.items():
            if v is not None and v < 1:
                raise ValueError(f"budget {k} must be >= 1")


class _Exhausted(Exception):
    """Budget ran out; carries the partial report."""

    def __init__(self, report: dict):
        super().__init__("budget exhausted")
        self.report = report


def _emit(report: dict, config: RunConfig) -> None:
    report = {"version": __version__, "config": asdict(config), **report}
    text = dumps(report) + "\n"
    if config.output:
        Path(config.output).write_text(text)
    else:
        sys.stdout.write(text)


def _spaces(config: RunConfig, k: int | None = None):
    if k is not None and len(config.inputs) != k:
        raise InputError(f"{config.command} needs {k} input files, got {len(config.inputs)}")
    return [load_space(p, tol=config.tolerance) for p in config.inputs]


def _cmd_dist(config: RunConfig) -> dict:
    X, Y = _spaces(config, 2)
    res = gh_distance(X, Y, config.options.get("method", "auto"))
    return {"result": res.to_dict()}


def _cmd_enumerate(config: RunConfig) -> dict:
    m, n = config.options["m"], config.options["n"]
    gen = enumerate_all_correspondences(m, n) if config.options.get("all") else enumerate_irreducible(m, n)
    return {"result": {"correspondences": [R.pair_list() for R in gen]}}


def _cone_point(path: str, config: RunConfig):
    if config.options.get("triple"):
        return load_triple(path)
    space = load_space(path, tol=config.tolerance)
    if space.n != 3:
        raise InputError(f"{path}: cone commands need 3-point spaces")
    return nu(space).x


def _cmd_cone(config: RunConfig) -> dict:
    action = config.options["action"]
    if action == "embed":
        if len(config.inputs) != 1:
            raise InputError("cone embed needs one input")
        if config.options.get("triple"):
            t = load_triple(config.inputs[0])
            return {"result": {"point": list(t), "in_cone": in_closed_cone(t) and t[0] > 0,
                               "strict": is_strict(t)}}
        space = load_space(config.inputs[0], tol=config.tolerance)
        p = nu(space)
        return {"result": {"point": list(p.x), "in_cone": p.is_in_cone, "strict": p.is_interior}}
    if action == "dist":
        X, Y = _spaces(config, 2)
        return {"result": {"value": gh_via_cone(X, Y)}}
    if len(config.inputs) != 3:
        raise InputError("cone star needs three inputs")
    pts = [_cone_point(p, config) for p in config.inputs]
    star = linf_star_optimum(pts)
    return {"result": {"center": list(star.center), "legs": list(star.legs), "total": star.total,
                       "dual_bound": star.dual_bound, "certified": star.certified}}


def _cmd_mf(config: RunConfig) -> dict:
    f = mf_boundary(_spaces(config, 3))
    sides = f.star_center_description["sides"]
    return {"result": {"legs": list(f.legs), "total": f.total, "pairwise_gh": list(sides)}}


def _cmd_smt(config: RunConfig) -> dict:
    boundary = _spaces(config, 3)
    N = config.options.get("n") or default_N(boundary)
    d = pairwise_gh(boundary)
    out = {
        "mf": sum(d) / 2,
        "pairwise_gh": list(d),
        "certified_lower": certified_smt_lower_bound(boundary, pairwise=d).value,
        "refined_lower": refined_smt_lower_bound(boundary, pairwise=d).value,
    }
    heur = smt_star_heuristic(boundary, N, seed=config.seed)
    out["heuristic"] = heur.to_dict()
    report = {"result": out}
    if not config.options.get("heuristic_only"):
        exact = smt_star_exact(boundary, N, budget=config.budgets["lp"])
        out["exact"] = exact.to_dict()
        if exact.kind != "exact":
            raise _Exhausted(report)
    return report


def _cmd_certify(config: RunConfig) -> dict:
    v = interval_certificate(_spaces(config, 3), config.options["legs"], tol=config.tolerance)
    return {"result": v.to_dict()}


def _cmd_ssr(config: RunConfig) -> int:
    o = config.options
    search = SearchConfig(seeds=o["seeds"], family=o["family"], random_starts=o["random_starts"],
                          N=o.get("n"), workers=o["workers"])
    records = sorted(iter_records(search), key=lambda r: (r.ratio_upper, r.seed))
    header = {"type": "header", "version": __version__, "config": asdict(config)}
    lines = [dumps(header)]
    lines.extend(dumps({"type": "record", **r.to_dict()}) for r in records)
    summary = {"type": "summary", **summarize(records)}
    lines.append(dumps(summary))
    text = "\n".join(lines) + "\n"
    if config.output:
        Path(config.output).write_text(text)
        sys.stdout.write(dumps(summary) + "\n")
    else:
        sys.stdout.write(text)
    return 0


HANDLERS = {
    "dist": _cmd_dist,
    "enumerate": _cmd_enumerate,
    "cone": _cmd_cone,
    "mf": _cmd_mf,
    "smt": _cmd_smt,
    "certify": _cmd_certify,
}


def run(config: RunConfig) -> int:
    try:
        if config.command == "ssr-search":
            return _cmd_ssr(config)
        report = HANDLERS[config.command](config)
    except _Exhausted as e:
        _emit({"status": "budget_exhausted", **e.report}, config)
        return 2
    except BudgetExceeded as e:
        _emit({"status": "budget_exhausted", "error": str(e)}, config)
        return 2
    except (FileNotFoundError, InputError, MetricError, CorrespondenceError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    _emit({"status": "ok", **report}, config)
    return 0


def _legs(text: str) -> list[float]:
    try:
        legs = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad legs {text!r}") from None
    if len(legs) != 3:
        raise argparse.ArgumentTypeError("need three comma-separated legs")
    return legs


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=TOL, help="validation tolerance (default 1e-9)")
    common.add_argument("--out", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="gh", description="Exact GH distances and Steiner stars in GH space.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", parents=[common], help="GH distance between two spaces")
    d.add_argument("inputs", nargs=2)
    d.add_argument("--method", default="auto", choices=["auto", "oracle", "irreducible", "bnb", "closed_form"])

    e = sub.add_parser("enumerate", parents=[common], help="list irreducible (or all) correspondences")
    e.add_argument("m", type=int)
    e.add_argument("n", type=int)
    e.add_argument("--all", action="store_true", help="every correspondence, not only irreducible ones")

    c = sub.add_parser("cone", parents=[common], help="3-point spaces as points of the cone")
    c.add_argument("action", choices=["embed", "star", "dist"])
    c.add_argument("inputs", nargs="+")
    c.add_argument("--triple", action="store_true", help="inputs are raw triples, not spaces")

    m = sub.add_parser("mf", parents=[common], help="minimal filling of a 3-space boundary")
    m.add_argument("inputs", nargs=3)

    s = sub.add_parser("smt", parents=[common], help="Steiner star bounds for a 3-space boundary")
    s.add_argument("inputs", nargs=3)
    s.add_argument("--n", type=int, default=None, help="max points of the star centre (default n1+n2+n3-2)")
    s.add_argument("--budget", type=float, default=1e6, help="LP solves allowed in the exact search")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--heuristic-only", action="store_true")

    k = sub.add_parser("certify", parents=[common], help="interval certificate for given legs")
    k.add_argument("inputs", nargs=3)
    k.add_argument("--legs", type=_legs, required=True, help="e.g. 1,1,1")

    r = sub.add_parser("ssr-search", parents=[common], help="random search for small mf/smt ratios")
    r.add_argument("--seeds", default="0..999", help="e.g. 0..999 or 1,5,9")
    r.add_argument("--family", default="near_violation", choices=["near_violation", "uniform"])
    r.add_argument("--random-starts", type=int, default=2)
    r.add_argument("--n", type=int, default=None)
    r.add_argument("--workers", type=int, default=None, help="default $GH_FORGE_THREADS or 1")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    opts: dict = {}
    budgets: dict = {}
    inputs = list(getattr(args, "inputs", []) or [])
    seed = 0
    if args.command == "dist":
        opts["method"] = args.method
    elif args.command == "enumerate":
        opts.update(m=args.m, n=args.n, all=args.all)
    elif args.command == "cone":
        opts.update(action=args.action, triple=args.triple)
    elif args.command == "smt":
        opts.update(n=args.n, heuristic_only=args.heuristic_only)
        budgets["lp"] = int(args.budget)
        seed = args.seed
    elif args.command == "certify":
        opts["legs"] = args.legs
    elif args.command == "ssr-search":
        workers = args.workers if args.workers is not None else default_workers()
        opts.update(seeds=parse_seeds(args.seeds), family=args.family, random_starts=args.random_starts,
                    n=args.n, workers=workers)
    return RunConfig(args.command, args.tol, seed, budgets, inputs, args.out, opts)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
