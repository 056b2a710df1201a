"""Local invariants of plane curve germs at the origin and the double point report."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import gcd
from typing import Sequence

from .groebner import INFINITE
from .mora import standard_basis
from .poly import Poly, VarContext, is_squarefree, poly_gcd
from .refmap import PreconditionError, ReflMapping, all_branches

__all__ = [
    "LocalCurve",
    "Unknown",
    "InvariantReport",
    "milnor",
    "intersection_number",
    "branch_count",
    "delta",
    "newton_edges",
    "full_report",
    "direct_milnor",
]


@dataclass(frozen=True)
class Unknown:
    """A value the toolkit could not determine, with the reason."""

    reason: str

    def __str__(self):
        return "unknown"


class LocalCurve:
    """Germ at the origin of a plane curve given by a polynomial in two variables."""

    def __init__(self, poly: Poly):
        if poly.ctx.nvars != 2:
            raise PreconditionError("a plane curve needs exactly two variables")
        self.poly = poly

    @property
    def is_empty(self) -> bool:
        return bool(self.poly.constant_term())

    @property
    def mult(self) -> int:
        return 0 if self.is_empty else self.poly.order()

    @property
    def tangent_cone(self) -> Poly:
        return self.poly.homogeneous_part(self.poly.order())

    def __repr__(self):
        return f"LocalCurve({self.poly})"


def _local_dim(gens: Sequence[Poly]):
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return INFINITE
    return standard_basis(gens).quotient_dim()


def _through_origin(g: Poly) -> bool:
    return not g.constant_term()


def milnor(c: LocalCurve):
    """dim of the local algebra by the Jacobian ideal; INFINITE for non-isolated singularities."""
    f = c.poly
    if f.is_zero():
        return INFINITE
    partials = [f.derivative(n) for n in f.ctx.names]
    # a plane germ is singular along a curve exactly when a repeated factor passes through the origin
    repeated = f
    for d in partials:
        repeated = poly_gcd(repeated, d)
    if _through_origin(repeated):
        return INFINITE
    return _local_dim(partials)


def intersection_number(a: LocalCurve, b: LocalCurve):
    if a.poly.is_zero() or b.poly.is_zero() or _through_origin(poly_gcd(a.poly, b.poly)):
        return INFINITE
    return _local_dim([a.poly, b.poly])


def newton_edges(f: Poly) -> tuple:
    """Compact edges of the Newton polygon as ((i0, j0), (i1, j1)), left to right.

    Also returns the smallest exponents of each variable.
    """
    best: dict = {}
    for e in f.terms:
        i, j = e
        if i not in best or j < best[i]:
            best[i] = j
    pts = sorted(best.items())
    min_i = pts[0][0]
    min_j = min(j for _, j in pts)
    end_i = min(i for i, j in pts if j == min_j)
    pts = [pt for pt in pts if pt[0] <= end_i]
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1)
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    edges = tuple((hull[k], hull[k + 1]) for k in range(len(hull) - 1))
    return edges, min_i, min_j


def _edge_squarefree(f: Poly, edge) -> tuple[bool, int]:
    (i0, j0), (i1, j1) = edge
    length = gcd(i1 - i0, j0 - j1)
    di, dj = (i1 - i0) // length, (j1 - j0) // length
    ctx = VarContext.of(["t"], "auxiliary")
    terms = {}
    for k in range(length + 1):
        c = f.terms.get((i0 + k * di, j0 + k * dj))
        if c is not None:
            terms[(k,)] = c
    e = Poly(ctx, f.field, terms, _clean=True)
    g = poly_gcd(e, e.derivative("t"))
    return g.is_constant(), length


def branch_count(c: LocalCurve):
    """Number of branches, or Unknown when the tiers below do not apply.

    Tiers: smooth germs; squarefree tangent cone (one smooth branch per
    tangent); Newton non-degenerate germs (each compact edge of lattice length
    l contributes l branches, each coordinate axis in the curve one more).
    """
    if c.is_empty or c.poly.is_zero():
        raise PreconditionError("branch count of an empty or zero germ")
    m = c.mult
    if m == 1:
        return 1
    if is_squarefree(c.tangent_cone):
        return m
    edges, min_i, min_j = newton_edges(c.poly)
    if min_i > 1 or min_j > 1:
        return Unknown("curve is not reduced")
    total = int(min_i == 1) + int(min_j == 1)
    for edge in edges:
        ok, length = _edge_squarefree(c.poly, edge)
        if not ok:
            return Unknown("Newton degenerate germ; needs Puiseux expansion")
        total += length
    return total


def delta(c: LocalCurve, mu=None, r=None):
    """delta = (mu + r - 1)/2 from Milnor number and branch count."""
    if c.is_empty:
        return 0
    mu = milnor(c) if mu is None else mu
    if mu == INFINITE:
        return INFINITE
    r = branch_count(c) if r is None else r
    if isinstance(r, Unknown):
        return r
    twice = mu + r - 1
    if twice % 2:
        raise AssertionError(f"mu={mu} and r={r} give a non-integral delta")
    return twice // 2


# -- report -------------------------------------------------------------------------

NOT_FINITE = "not A-finite"
UNKNOWN = "unknown"


@dataclass
class InvariantReport:
    """Matrix encoding of the double point branches (identity excluded).

    M and Delta hold 0 for empty branches, the invariant for reduced ones and
    -1 otherwise (None when a branch count is unknown).  I has 1 on the
    diagonal exactly for empty branches and -1 for infinite intersections.
    """

    ordering: list
    labels: list
    M: list
    Delta: list
    I: list
    branches: list
    k: int
    group_order: int
    mu_total: object
    delta_total: object
    branch_total: object
    finite: bool
    notes: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "InvariantReport":
        return cls(**json.loads(text))

    def to_text(self) -> str:
        cells = lambda v: "?" if v is None else str(v)  # noqa: E731
        labels = self.labels
        width = max([len(s) for s in labels] + [max((len(cells(x)) for row in self.I for x in row), default=1), 2])
        fmt = lambda xs: " ".join(cells(x).rjust(width) for x in xs)  # noqa: E731
        lines = ["branch  " + fmt(labels)]
        lines.append("M       " + fmt(self.M))
        lines.append("Delta   " + fmt(self.Delta))
        lines.append("r       " + fmt(self.branches))
        lines.append("I")
        for lab, row in zip(labels, self.I):
            lines.append(f"  {lab.ljust(6)}" + fmt(row))
        lines.append(f"empty branches k = {self.k}")
        lines.append(f"mu(D)     = {self.mu_total}")
        lines.append(f"delta(D)  = {self.delta_total}")
        lines.append(f"branches  = {self.branch_total}")
        lines.append(f"A-finite  = {'yes' if self.finite else 'no'}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines)


def _enc(v):
    if v == INFINITE:
        return -1
    if isinstance(v, Unknown):
        return None
    return int(v)


def full_report(f: ReflMapping, ordering: str = "paper", labels: Sequence[str] | None = None) -> InvariantReport:
    if f.chart_map is None:
        raise PreconditionError("the invariant report needs a chart")
    if f.p != 3 or f.n != 2 or f.parameters:
        raise PreconditionError("the invariant report needs a surface in 3-space without free parameters")
    if not f.smooth_at_origin():
        raise PreconditionError("Y is not smooth at the origin")
    branches = all_branches(f, ordering)
    order = [b.sigma for b in branches]
    curves = [None if b.empty else LocalCurve(b.pulled) for b in branches]
    notes = []
    M, D, R = [], [], []
    for b, c in zip(branches, curves):
        if c is None:
            M.append(0)
            D.append(0)
            R.append(0)
            continue
        mu = milnor(c)
        if mu == INFINITE:
            M.append(-1)
            D.append(-1)
            R.append(None)
            continue
        r = branch_count(c)
        d = delta(c, mu, r)
        if isinstance(r, Unknown):
            notes.append(f"branch {b.sigma}: {r.reason}")
        M.append(int(mu))
        D.append(_enc(d))
        R.append(_enc(r))
    n = len(branches)
    I = [[0] * n for _ in range(n)]
    for i in range(n):
        I[i][i] = 1 if curves[i] is None else 0
        for j in range(i + 1, n):
            if curves[i] is None or curves[j] is None:
                v = 0
            else:
                v = _enc(intersection_number(curves[i], curves[j]))
            I[i][j] = I[j][i] = v
    W = f.group.order
    finite = all(x != -1 for x in M) and all(x != -1 for row in I for x in row)
    if finite:
        mu_total = sum(M) + sum(map(sum, I)) - W + 2
        if any(x is None for x in D):
            delta_total = branch_total = UNKNOWN
        else:
            delta_total = sum(D) + sum(I[i][j] for i in range(n) for j in range(i + 1, n))
            branch_total = sum(2 * D[i] - M[i] - I[i][i] for i in range(n)) + W - 1
    else:
        mu_total = delta_total = branch_total = NOT_FINITE
    k = sum(1 for c in curves if c is None)
    if labels is None:
        labels = [str(i) for i in order]
    return InvariantReport(order, list(labels), M, D, I, R, k, W, mu_total, delta_total, branch_total, finite, notes)


def direct_milnor(f: ReflMapping):
    """Milnor number of the product of all pulled-back branch equations."""
    prod = None
    for b in all_branches(f, "table"):
        prod = b.pulled if prod is None else prod * b.pulled
    return milnor(LocalCurve(prod))
