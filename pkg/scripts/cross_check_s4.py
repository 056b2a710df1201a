"""Break the tetrahedral chart report ((x+y)^2, x, y) down branch by branch.

Prints each branch with its matrix, pulled-back equation and local invariants,
then the totals.  With --direct it also computes the Milnor number of the whole
double point curve from the product of all branch equations (slow).

    python3 scripts/cross_check_s4.py [--direct]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from reflmap.curveinv import direct_milnor, full_report
from reflmap.groebner import gb_settings
from reflmap.problem import load_problem
from reflmap.refmap import all_branches

PROBLEM = Path(__file__).resolve().parent.parent / "problems" / "s4_chart.json"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--direct", action="store_true", help="also compute mu of the product curve")
    args = ap.parse_args()
    f = load_problem(PROBLEM).mapping
    rep = full_report(f)
    branches = {b.sigma: b for b in all_branches(f)}
    for k, s in enumerate(rep.ordering):
        e = f.group.elements[s]
        b = branches[s]
        mat = " ".join("[" + ",".join(str(x) for x in row) + "]" for row in e.matrix)
        inv = "empty" if b.empty else f"mu={rep.M[k]} delta={rep.Delta[k]} r={rep.branches[k]}"
        print(f"{s:3d} {b.kind:15s} inverse {e.inverse_index:3d}  {inv:22s} {mat}")
        if not b.empty:
            print(f"      pulled back: {b.pulled}")
    n = len(rep.ordering)
    pairs = sum(rep.I[i][j] for i in range(n) for j in range(i + 1, n))
    print(f"sum M = {sum(rep.M)}, sum Delta = {sum(rep.Delta)}, sum_(i<j) I = {pairs}, empty k = {rep.k}")
    print(f"mu(D) = {rep.mu_total}, delta(D) = {rep.delta_total}, branches = {rep.branch_total}")
    if args.direct:
        t = time.perf_counter()
        with gb_settings(step_budget=10**9):
            mu = direct_milnor(f)
        print(f"direct mu of the product curve = {mu} ({time.perf_counter() - t:.0f} s)")


if __name__ == "__main__":
    main()
