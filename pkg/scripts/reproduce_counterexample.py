"""Rebuild the three-triangle boundary whose Steiner star is longer than its filling.

Prints pairwise GH distances, the minimal filling, the interval certificate at
legs (1, 1, 1), both certified lower bounds, and heuristic / exact star lengths
for a range of centre sizes N.

    python scripts/reproduce_counterexample.py --max-n 5
"""

import argparse
import time

from ghforge.fileio import dumps
from ghforge.metric import triangle_space
from ghforge.steiner import (
    certified_smt_lower_bound,
    interval_certificate,
    mf_boundary,
    pairwise_gh,
    refined_smt_lower_bound,
    smt_star_exact,
    smt_star_heuristic,
)

SIDES = [(8, 22, 29.5), (11.5, 18, 29), (12, 21.5, 33)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=5, help="largest centre size for the exact search")
    ap.add_argument("--budget", type=int, default=10**6)
    args = ap.parse_args()

    boundary = [triangle_space(*s) for s in SIDES]
    d = pairwise_gh(boundary)
    mf = mf_boundary(boundary).total
    print("pairwise GH:", d, " mf:", mf)
    print("certificate at legs 1:", dumps(interval_certificate(boundary, (1, 1, 1)).to_dict()))
    corner = certified_smt_lower_bound(boundary, pairwise=d).value
    refined = refined_smt_lower_bound(boundary, pairwise=d).value
    print(f"corner lower bound {corner:.6f} (ratio <= {mf / corner:.6f})")
    print(f"refined lower bound {refined:.6f} (ratio <= {mf / refined:.6f})")
    heur = smt_star_heuristic(boundary)
    print(f"heuristic star {heur.total:.6f}  Z = {heur.Z.d.tolist()}")
    for N in range(3, args.max_n + 1):
        t0 = time.perf_counter()
        r = smt_star_exact(boundary, N=N, budget=args.budget)
        print(f"N={N}: {r.kind} {r.total:.6f}  lp solves {r.lp_solves}  {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
