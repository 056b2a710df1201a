"""Run every shipped problem file through the main computations and print a summary.

    python3 scripts/run_examples.py [--only NAME ...]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from reflmap.curveinv import full_report
from reflmap.problem import load_problem
from reflmap.refmap import PreconditionError, degree, image_equation, k2sigma_charts

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def summarize(path: Path) -> list[str]:
    prob = load_problem(path, max_group_order=4096)
    f = prob.mapping
    lines = [f"== {path.stem}: {prob.spec.name}",
             f"   group order {f.group.order}, {len(f.group.reflections)} reflections, N={prob.field.N}"]
    if not f.is_hypersurface:
        G = f.group
        for i in range(1, len(G.cyclic_orders or ()) + 1):
            s = G.index_of_exponents([1] * i + [0] * (len(G.cyclic_orders) - i))
            r = k2sigma_charts(f, s)
            desc = "empty" if r.empty else f"dim {r.dim}, exceptional dim {r.exceptional_dim}"
            lines.append(f"   K2 sigma_{i}: {desc}")
        return lines
    lines.append(f"   degree {degree(f)}")
    if not f.parameters:
        g = image_equation(f)
        text = str(g)
        lines.append(f"   image ({g.total_degree()}): {text if len(text) < 100 else text[:97] + '...'}")
    try:
        rep = full_report(f)
        lines.append(f"   mu(D)={rep.mu_total} delta(D)={rep.delta_total} branches={rep.branch_total}")
    except PreconditionError as exc:
        lines.append(f"   no invariant report: {exc}")
    return lines


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", nargs="*", help="problem names without .json")
    args = ap.parse_args()
    paths = sorted(PROBLEMS.glob("*.json"))
    if args.only:
        paths = [p for p in paths if p.stem in set(args.only)]
    for path in paths:
        if path.stem == "bad_omega":
            continue
        t = time.perf_counter()
        for line in summarize(path):
            print(line)
        print(f"   ({time.perf_counter() - t:.1f} s)")


if __name__ == "__main__":
    main()
