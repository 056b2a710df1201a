"""Command line front end: ``reflmap <command> problem.json``."""

from __future__ import annotations

import argparse
import json
import sys

from .curveinv import full_report
from .cyclotomic import FieldMismatchError
from .groebner import ResourceError, gb_settings
from .group import GroupCapError, GroupError, verify_orbit_map
from .parsing import ParseError
from .problem import ProblemError, load_problem
from .refmap import (
    PreconditionError,
    all_branches,
    degree,
    dsigma_ideal,
    image_equation,
    image_reduced,
    k2sigma_charts,
    pointwise_stabilizer,
    setwise_stabilizer,
)

EXIT_OK, EXIT_INPUT, EXIT_MATH, EXIT_RESOURCE = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_info(args, prob) -> int:
    G = prob.group
    report = verify_orbit_map(G, prob.omega)
    fix = [e.fix_dim for e in G.elements]
    data = {
        "order": G.order,
        "reflections": len(G.reflections),
        "fix_dims": fix,
        "omega": [str(w) for w in prob.omega.omegas],
        "omega_degrees": list(prob.omega.degrees),
        "omega_verified": report.ok,
        "failures": list(report.failures),
    }
    lines = [f"order {G.order}, reflections {len(G.reflections)}, "
             + ("omega verified" if report.ok else "omega NOT verified")]
    lines.append("fix dims " + " ".join(map(str, fix)))
    lines.append("degrees of omega " + " ".join(map(str, prob.omega.degrees)))
    lines += [f"failed: {m}" for m in report.failures]
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_MATH


def cmd_degree(args, prob) -> int:
    f = prob.mapping
    d = degree(f)
    sw, pw = setwise_stabilizer(f), pointwise_stabilizer(f)
    data = {"degree": d, "setwise_stabilizer": sw, "pointwise_stabilizer": pw}
    _emit(args, data, f"degree {d}\nsetwise stabilizer order {len(sw)}\npointwise stabilizer order {len(pw)}")
    return EXIT_OK


def cmd_image(args, prob) -> int:
    f = prob.mapping
    g = image_equation(f)
    reduced = image_reduced(f, g)
    data = {"equation": str(g), "reduced": reduced, "total_degree": g.total_degree(), "variables": list(g.ctx.names)}
    _emit(args, data, f"{g}\nreduced {'yes' if reduced else 'no'}")
    return EXIT_OK


def cmd_branches(args, prob) -> int:
    f = prob.mapping
    rows = []
    if f.is_hypersurface:
        for b in all_branches(f, args.ordering):
            rows.append({
                "sigma": b.sigma,
                "kind": b.kind,
                "lambda": str(b.lam),
                "pulled_back": None if b.pulled is None else str(b.pulled),
                "empty": b.empty,
                "empty_at_origin": b.local_empty,
                "empty_globally": b.global_empty,
                "dim": b.dim,
            })
    else:
        for s in prob.group.report_ordering(args.ordering):
            b = dsigma_ideal(f, s)
            rows.append({
                "sigma": b.sigma,
                "kind": b.kind,
                "ideal": [str(g) for g in b.gens],
                "empty": b.empty,
                "dim": b.dim,
            })
    lines = []
    for r in rows:
        head = f"sigma {r['sigma']} ({r['kind']}): " + ("empty" if r["empty"] else f"dim {r['dim']}")
        lines.append(head)
        if "lambda" in r:
            lines.append(f"  lambda = {r['lambda']}")
            if r["pulled_back"] is not None:
                lines.append(f"  pulled back = {r['pulled_back']}")
        else:
            lines += [f"  {g}" for g in r["ideal"]]
    _emit(args, {"branches": rows}, "\n".join(lines))
    return EXIT_OK


def cmd_invariants(args, prob) -> int:
    rep = full_report(prob.mapping, args.ordering)
    if args.json:
        print(rep.to_json())
    else:
        print(rep.to_text())
    return EXIT_OK


def _parse_sigma(text: str, G) -> int:
    parts = [p.strip() for p in text.split(",")]
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise _Fail(EXIT_INPUT, f"--sigma expects an index or comma separated exponents, got {text!r}") from None
    if len(nums) == 1:
        i = nums[0]
    else:
        if G.cyclic_orders is None:
            raise _Fail(EXIT_INPUT, "exponent vectors are only meaningful for cyclic products")
        if len(nums) != len(G.cyclic_orders):
            raise _Fail(EXIT_INPUT, f"expected {len(G.cyclic_orders)} exponents")
        i = G.index_of_exponents(nums)
    if not 0 < i < G.order:
        raise _Fail(EXIT_INPUT, f"sigma index must lie in 1..{G.order - 1}")
    return i


def cmd_k2(args, prob) -> int:
    G = prob.group
    s = _parse_sigma(args.sigma, G)
    res = k2sigma_charts(prob.mapping, s)
    charts = [
        {"chart": c.j + 1, "empty": c.empty, "dim": c.dim, "closure_dim": c.closure_dim,
         "exceptional_dim": c.exceptional_dim}
        for c in res.charts
    ]
    data = {"sigma": s, "empty": res.empty, "dim": res.dim, "closure_dim": res.closure_dim,
            "exceptional_dim": res.exceptional_dim, "charts": charts}
    if G.cyclic_orders is not None:
        data["exponents"] = list(G.exponents(s))
    lines = [f"sigma {s}: " + ("empty" if res.empty else
                               f"dim {res.dim}, off-exceptional dim {res.closure_dim}, exceptional dim {res.exceptional_dim}")]
    for c in charts:
        lines.append(f"  chart v{c['chart']}=1: " + ("empty" if c["empty"] else
                                                    f"dim {c['dim']}, closure {c['closure_dim']}, exceptional {c['exceptional_dim']}"))
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


COMMANDS = {
    "info": cmd_info,
    "degree": cmd_degree,
    "image": cmd_image,
    "branches": cmd_branches,
    "invariants": cmd_invariants,
    "k2": cmd_k2,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine readable output")
    common.add_argument("--max-group-order", type=int, default=1024, metavar="N")
    common.add_argument("--step-budget", type=int, default=10**6, metavar="N")
    common.add_argument("--ordering", choices=("paper", "table"), default="paper",
                        help="branch order: reflections first, or group table order")
    ap = argparse.ArgumentParser(prog="reflmap", description="Analyse reflection mappings given by problem files.")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "info": "group order, reflections and orbit map check",
        "degree": "degree of the mapping and stabilizer orders",
        "image": "equation of the image",
        "branches": "double point branches",
        "invariants": "Milnor number and delta invariant of the double point curve",
        "k2": "affine charts of one K2 branch",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        p.add_argument("problem", help="problem file (JSON)")
        if name == "k2":
            p.add_argument("--sigma", required=True, help="group index, or comma separated exponents")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with gb_settings(step_budget=args.step_budget):
            try:
                prob = load_problem(args.problem, max_group_order=args.max_group_order)
            except PreconditionError as exc:
                raise _Fail(EXIT_INPUT, str(exc)) from exc
            return COMMANDS[args.command](args, prob)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ResourceError, GroupCapError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (ProblemError, ParseError, GroupError, FieldMismatchError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
