"""Declarative problem files (JSON) describing one reflection mapping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .cyclotomic import CycloField, make_field, parse_cyclo
from .group import OrbitMap, ReflGroup, builtin_group, close_group, extend_trivially
from .parsing import ParseError
from .poly import Poly, VarContext, parse_poly, substitute
from .refmap import ReflMapping

__all__ = ["ProblemError", "ProblemSpec", "Problem", "load_problem", "build_problem"]


class ProblemError(ValueError):
    """The problem file is malformed or inconsistent."""


@dataclass
class ProblemSpec:
    """Raw content of a problem file, validated for shape but not yet parsed."""

    conductor: int
    space: list
    target: list
    parameters: list
    group: dict
    hypersurface: list
    omega: list | None = None
    chart: dict | None = None
    substitutions: dict = field(default_factory=dict)
    name: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        if not isinstance(data, dict):
            raise ProblemError("a problem file must hold a JSON object")
        known = {"name", "conductor", "variables", "group", "omega", "hypersurface", "chart", "substitutions", "comment"}
        extra = set(data) - known
        if extra:
            raise ProblemError(f"unknown keys: {sorted(extra)}")
        for key in ("conductor", "variables", "group", "hypersurface"):
            if key not in data:
                raise ProblemError(f"missing key {key!r}")
        N = data["conductor"]
        if not isinstance(N, int) or isinstance(N, bool) or N < 1:
            raise ProblemError("conductor must be a positive integer")
        var = data["variables"]
        if not isinstance(var, dict) or "space" not in var or "target" not in var:
            raise ProblemError("variables needs 'space' and 'target' lists")
        space = _names(var["space"], "variables.space")
        target = _names(var["target"], "variables.target")
        params = _names(var.get("parameters", []), "variables.parameters")
        everything = space + target + params
        if len(set(everything)) != len(everything):
            raise ProblemError("variable names must be distinct")
        group = data["group"]
        if not isinstance(group, dict) or ("builtin" in group) == ("generators" in group):
            raise ProblemError("group needs exactly one of 'builtin' or 'generators'")
        hyp = data["hypersurface"]
        if isinstance(hyp, str):
            hyp = [hyp]
        if not isinstance(hyp, list) or not hyp or not all(isinstance(h, str) for h in hyp):
            raise ProblemError("hypersurface must be a non-empty list of polynomial strings")
        omega = data.get("omega")
        if omega is not None and (not isinstance(omega, list) or not all(isinstance(w, str) for w in omega)):
            raise ProblemError("omega must be a list of polynomial strings")
        chart = data.get("chart")
        if chart is not None:
            if not isinstance(chart, dict) or "source" not in chart or "map" not in chart:
                raise ProblemError("chart needs 'source' and 'map'")
            _names(chart["source"], "chart.source")
            if not isinstance(chart["map"], dict):
                raise ProblemError("chart.map must map space variables to polynomial strings")
        subs = data.get("substitutions", {})
        if not isinstance(subs, dict):
            raise ProblemError("substitutions must be an object")
        for k in subs:
            if k not in params:
                raise ProblemError(f"substitution for undeclared parameter {k!r}")
        return cls(N, space, target, params, group, list(hyp), omega, chart, dict(subs), str(data.get("name", "")))


def _names(value: Any, where: str) -> list:
    if not isinstance(value, list) or not all(isinstance(v, str) and v.isidentifier() for v in value):
        raise ProblemError(f"{where} must be a list of identifiers")
    return list(value)


@dataclass
class Problem:
    spec: ProblemSpec
    field: CycloField
    group: ReflGroup
    omega: OrbitMap
    mapping: ReflMapping


def _poly(text: str, ctx: VarContext, F: CycloField, where: str) -> Poly:
    try:
        return parse_poly(str(text), ctx, F)
    except ParseError as exc:
        raise ProblemError(f"{where}: {exc}") from exc


def _group(spec: ProblemSpec, F: CycloField, cap: int):
    g = spec.group
    if "builtin" in g:
        extra = _names(g.get("trivial_extension", []), "group.trivial_extension")
        k = len(spec.space) - len(extra)
        if spec.space[k:] != extra:
            raise ProblemError("trivially extended variables must be the last space variables")
        G, om = builtin_group(g["builtin"], F, space=spec.space[:k], orders=g.get("orders"), cap=cap)
        G, om = extend_trivially(G, om, extra)
        if spec.omega is not None:
            om = OrbitMap(tuple(_poly(w, G.space_ctx, F, "omega") for w in spec.omega))
        return G, om
    gens = g["generators"]
    if not isinstance(gens, list) or not gens:
        raise ProblemError("group.generators must be a non-empty list of matrices")
    mats = []
    for m in gens:
        if not isinstance(m, list) or not all(isinstance(r, list) for r in m):
            raise ProblemError("each generator must be a list of rows")
        try:
            mats.append([[parse_cyclo(str(x), F) for x in row] for row in m])
        except ParseError as exc:
            raise ProblemError(f"generator entry: {exc}") from exc
    if any(len(m) != len(spec.space) for m in mats):
        raise ProblemError("generator size does not match the number of space variables")
    G = close_group(mats, F, spec.space, cap)
    if spec.omega is None:
        raise ProblemError("omega is required for groups given by generators")
    om = OrbitMap(tuple(_poly(w, G.space_ctx, F, "omega") for w in spec.omega))
    return G, om


def build_problem(spec: ProblemSpec, *, max_group_order: int = 1024) -> Problem:
    F = make_field(spec.conductor)
    G, om = _group(spec, F, max_group_order)
    if len(om.omegas) != G.dim:
        raise ProblemError(f"omega has {len(om.omegas)} components for a space of dimension {G.dim}")
    if len(spec.target) != G.dim:
        raise ProblemError("the number of target variables must equal the space dimension")
    ctx = G.space_ctx.extend(spec.parameters, "parameter")
    fixed = {}
    for name, value in spec.substitutions.items():
        fixed[name] = Poly.const(ctx, F, parse_cyclo(str(value), F))
    free = [t for t in spec.parameters if t not in fixed]
    fctx = G.space_ctx.extend(free, "parameter")

    def specialize(p: Poly) -> Poly:
        if not fixed:
            return p.embed(fctx)
        assign = {n: Poly.var(ctx, F, n) for n in ctx.names if n not in fixed}
        assign.update(fixed)
        out = substitute(p, assign, ctx)
        return out.embed(fctx)

    L = tuple(specialize(_poly(h, ctx, F, "hypersurface")) for h in spec.hypersurface)
    source = chart_map = None
    if spec.chart is not None:
        source = spec.chart["source"]
        if set(source) & set(ctx.names):
            raise ProblemError("chart source variables clash with space or parameter names")
        sctx = VarContext(tuple(source) + tuple(spec.parameters),
                          ("source",) * len(source) + ("parameter",) * len(spec.parameters))
        free_sctx = VarContext(tuple(source) + tuple(free), ("source",) * len(source) + ("parameter",) * len(free))
        chart_map = {}
        for name, text in spec.chart["map"].items():
            if name not in spec.space:
                raise ProblemError(f"chart.map names {name!r}, which is not a space variable")
            p = _poly(text, sctx, F, "chart.map")
            if fixed:
                assign = {n: Poly.var(sctx, F, n) for n in sctx.names if n not in fixed}
                assign.update({k: Poly.const(sctx, F, v.constant_term()) for k, v in fixed.items()})
                p = substitute(p, assign, sctx)
            chart_map[name] = p.embed(free_sctx)
        missing = set(spec.space) - set(chart_map)
        if missing:
            raise ProblemError(f"chart.map lacks {sorted(missing)}")
    f = ReflMapping(G, om, L, tuple(spec.target), tuple(free), tuple(source) if source else None, chart_map)
    return Problem(spec, F, G, om, f)


def load_problem(path: str | Path, *, max_group_order: int = 1024) -> Problem:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON: {exc}") from exc
    return build_problem(ProblemSpec.from_dict(data), max_group_order=max_group_order)
