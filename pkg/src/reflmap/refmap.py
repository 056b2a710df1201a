"""Reflection mappings: stabilizers, degree, image equation, double point branches."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, lcm
from typing import Mapping, Sequence

from gmpy2 import mpq

from .group import GroupElem, OrbitMap, ReflGroup, act, mat_inverse
from .groebner import IdealBasis, eliminate, groebner, krull_dim, normal_form, saturate
from .orders import DEGREVLEX
from .poly import Poly, VarContext, determinant, exact_divide, jacobian, minors, substitute

__all__ = [
    "PreconditionError",
    "ReflMapping",
    "BranchIdeal",
    "K2Chart",
    "K2Result",
    "setwise_stabilizer",
    "pointwise_stabilizer",
    "degree",
    "generically_one_to_one",
    "image_equation",
    "image_reduced",
    "normalize_integral",
    "alpha_sigma",
    "branch_lambda",
    "all_branches",
    "dsigma_ideal",
    "k2sigma_charts",
    "check_identities",
]


class PreconditionError(ValueError):
    """A mathematical precondition of an operation does not hold."""


@dataclass
class ReflMapping:
    """A reflection mapping: group, orbit map, equations L of Y, optional chart.

    ``ctx`` holds the space variables followed by any parameters; the target
    variables are named by ``target`` and the chart by ``chart_source`` with
    ``chart_map`` sending each space variable to a polynomial in the source.
    """

    group: ReflGroup
    omega: OrbitMap
    L: tuple
    target: tuple
    parameters: tuple = ()
    chart_source: tuple | None = None
    chart_map: Mapping | None = None

    def __post_init__(self):
        G = self.group
        self.space = G.space_ctx.names
        self.ctx = G.space_ctx.extend(self.parameters, "parameter")
        self.L = tuple(l.embed(self.ctx) for l in self.L)
        if not self.L:
            raise PreconditionError("at least one equation is required")
        if len(self.target) != G.dim:
            raise PreconditionError(f"{len(self.target)} target variables for a group of dimension {G.dim}")
        overlap = set(self.target) & set(self.ctx.names)
        if overlap:
            raise PreconditionError(f"target variables clash with space variables: {sorted(overlap)}")
        if self.chart_map is not None:
            if set(self.chart_map) != set(self.space):
                raise PreconditionError("the chart must give an expression for every space variable")
            self.source_ctx = VarContext(tuple(self.chart_source) + self.parameters,
                                         ("source",) * len(self.chart_source) + ("parameter",) * len(self.parameters))
            self.chart_polys = {k: v.embed(self.source_ctx) for k, v in self.chart_map.items()}
            for l in self.L:
                if not self.pullback(l).is_zero():
                    raise PreconditionError(f"chart does not parametrize Y: L = {l} does not vanish on it")

    @property
    def p(self) -> int:
        return self.group.dim

    @property
    def n(self) -> int:
        return self.group.dim - len(self.L)

    @property
    def field(self):
        return self.group.field

    @property
    def is_hypersurface(self) -> bool:
        return len(self.L) == 1

    def pullback(self, P: Poly) -> Poly:
        if self.chart_map is None:
            raise PreconditionError("no chart was given")
        return substitute(P.embed(self.ctx), self.chart_polys, self.source_ctx)

    @cached_property
    def L_basis(self) -> IdealBasis:
        return groebner(list(self.L), DEGREVLEX)

    def smooth_at_origin(self) -> bool:
        """Rank of the Jacobian of L at the origin equals the number of equations."""
        rows = [[d.constant_term() for d in jacobian(l, self.space)] for l in self.L]
        from .group import rref

        return len(rref(rows)[0]) == len(self.L)


# -- stabilizers and degree -----------------------------------------------------


def setwise_stabilizer(f: ReflMapping) -> list:
    """Indices sigma with <sigma L> = <L>, compared via reduced Groebner bases."""
    base = f.L_basis.gens
    out = []
    for e in f.group.elements:
        moved = [act(e, l) for l in f.L]
        if e.index == 0 or groebner(moved, DEGREVLEX).gens == base:
            out.append(e.index)
    return out


def pointwise_stabilizer(f: ReflMapping) -> list:
    """Indices sigma whose fixed-space forms all lie in <L>."""
    out = [0]
    for e in f.group.elements[1:]:
        if all(f.L_basis.contains(l.embed(f.ctx)) for l in e.ell):
            out.append(e.index)
    return out


def degree(f: ReflMapping) -> int:
    a, b = len(setwise_stabilizer(f)), len(pointwise_stabilizer(f))
    if a % b:
        raise AssertionError(f"stabilizer orders {a} and {b} do not divide")
    return a // b


def generically_one_to_one(f: ReflMapping) -> bool:
    return setwise_stabilizer(f) == pointwise_stabilizer(f)


# -- image -----------------------------------------------------------------------


def normalize_integral(g: Poly) -> Poly:
    """Scale to degrevlex-monic, clear denominators, remove integer content, positive lead."""
    if g.is_zero():
        return g
    g = g.monic(DEGREVLEX)
    if not g.is_rational():
        return g
    coeffs = [c.rational() for c in g.terms.values()]
    den = 1
    for c in coeffs:
        den = lcm(den, int(c.denominator))
    content = 0
    for c in coeffs:
        content = gcd(content, int(c.numerator * den // c.denominator))
    return g * mpq(den, content)


def orbit_product(f: ReflMapping) -> Poly:
    """Product of sigma L over the whole group (hypersurface case)."""
    P = Poly.const(f.ctx, f.field, 1)
    for e in f.group.elements:
        P = P * act(e, f.L[0])
    return P


def image_equation(f: ReflMapping, *, budget=None) -> Poly:
    """Generator of the elimination ideal of <prod sigma L, X - omega>, normalised.

    The result lives in the context (target variables, parameters).
    """
    if not f.is_hypersurface:
        raise PreconditionError("the image equation needs a hypersurface (a single equation L)")
    P = orbit_product(f)
    F = f.field
    big = VarContext(f.space + tuple(f.target) + f.parameters,
                     ("space",) * f.p + ("target",) * f.p + ("parameter",) * len(f.parameters))
    gens = [Poly.var(big, F, X) - w.embed(big) for X, w in zip(f.target, f.omega.omegas)]
    gens.append(P.embed(big))
    elim = eliminate(gens, f.space, budget=budget)
    if len(elim) != 1:
        raise PreconditionError(f"non-principal image ideal ({len(elim)} generators)")
    g = normalize_integral(elim[0])
    # cross-check: g(omega) is a constant multiple of the orbit product
    assign = {X: w.embed(f.ctx) for X, w in zip(f.target, f.omega.omegas)}
    gw = substitute(g, assign, f.ctx)
    _, a = gw.leading()
    _, b = P.leading()
    if gw * b != P * a:
        raise AssertionError("image equation does not pull back to the orbit product")
    return g


def image_reduced(f: ReflMapping, g: Poly | None = None) -> bool:
    """Whether the image hypersurface is reduced; cross-checks a squarefree test on g."""
    one_to_one = generically_one_to_one(f)
    if g is None:
        g = image_equation(f)
    names = g.ctx.names
    sing = groebner([g] + [g.derivative(x) for x in names], DEGREVLEX)
    squarefree = krull_dim(sing) < len(names) - 1
    if squarefree != one_to_one:
        raise AssertionError("reducedness of the image disagrees with generic injectivity")
    return one_to_one


# -- double point branches ---------------------------------------------------------


def _sigma(f: ReflMapping, sigma) -> GroupElem:
    e = f.group.elements[sigma] if isinstance(sigma, int) else sigma
    if e.index == 0:
        raise PreconditionError("sigma must not be the identity")
    return e


def sigma_difference(f: ReflMapping, sigma) -> list:
    """The components of sigma^-1 L - L, i.e. L(sigma u) - L(u)."""
    e = _sigma(f, sigma)
    inv = f.group.elements[e.inverse_index]
    return [act(inv, l) - l for l in f.L]


def alpha_sigma(f: ReflMapping, sigma) -> list:
    """Matrix alpha with sigma^-1 L - L = alpha . ell_sigma, by Taylor splitting."""
    e = _sigma(f, sigma)
    rows, piv = e.ell_rows, e._classes[1]
    ctx, F = f.ctx, f.field
    space = f.space
    nonpiv = [c for c in range(f.p) if c not in piv]
    var = {name: Poly.var(ctx, F, name) for name in space}
    # phi makes ell_i(phi(u)) = u_{piv_i}; psi is its inverse
    phi, psi = {}, {}
    for r, pc in zip(rows, piv):
        shift = sum((var[space[c]] * r[c] for c in nonpiv if r[c]), Poly.zero(ctx, F))
        phi[space[pc]] = var[space[pc]] - shift
        psi[space[pc]] = var[space[pc]] + shift
    qs = sigma_difference(f, e)
    alpha = []
    for q in qs:
        rest = substitute(q, phi, ctx)
        row = []
        for pc in piv:
            y = space[pc]
            at0 = substitute(rest, {y: Poly.zero(ctx, F)}, ctx)
            a = exact_divide(rest - at0, var[y])
            row.append(substitute(a, psi, ctx))
            rest = at0
        if not rest.is_zero():
            raise AssertionError("sigma^-1 L - L does not vanish on Fix sigma")
        alpha.append(row)
    ell = [l.embed(ctx) for l in e.ell]
    for q, row in zip(qs, alpha):
        if sum((a * l for a, l in zip(row, ell)), Poly.zero(ctx, F)) != q:
            raise AssertionError("alpha . ell identity failed")
    return alpha


@dataclass
class BranchIdeal:
    sigma: int
    kind: str  # reflection | non_reflection
    gens: tuple
    lam: Poly | None = None
    pulled: Poly | None = None
    empty: bool = False
    local_empty: bool | None = None
    global_empty: bool | None = None
    dim: int | None = None


def branch_lambda(f: ReflMapping, sigma) -> BranchIdeal:
    """lambda_sigma = (sigma^-1 L - L)/ell_sigma for reflections, sigma^-1 L - L otherwise."""
    if not f.is_hypersurface:
        raise PreconditionError("branch equations need a hypersurface")
    e = _sigma(f, sigma)
    q = sigma_difference(f, e)[0]
    if e.is_reflection:
        ell = e.ell[0].embed(f.ctx)
        lam = exact_divide(q, ell)
        kind = "reflection"
    else:
        lam = q
        kind = "non_reflection"
    B = groebner([lam, f.L[0]], DEGREVLEX)
    global_empty = B.is_unit()
    pulled = None
    local_empty = None
    if f.chart_map is not None:
        pulled = f.pullback(lam)
        local_empty = bool(pulled.constant_term())
    empty = local_empty if local_empty is not None else global_empty
    return BranchIdeal(e.index, kind, (f.L[0], lam), lam, pulled, empty, local_empty, global_empty, krull_dim(B))


def all_branches(f: ReflMapping, ordering: str = "paper") -> list:
    return [branch_lambda(f, i) for i in f.group.report_ordering(ordering)]


def dsigma_ideal(f: ReflMapping, sigma) -> BranchIdeal:
    """Ideal of the branch D_2^sigma, with its Krull dimension."""
    e = _sigma(f, sigma)
    r = e.fix_dim
    if r >= f.n:
        alpha = alpha_sigma(f, e)
        gens = list(f.L) + minors(alpha, f.p - r)
    else:
        inv = f.group.elements[e.inverse_index]
        gens = list(f.L) + [act(inv, l) for l in f.L]
    B = groebner(gens, DEGREVLEX)
    dim = krull_dim(B)
    kind = "reflection" if e.is_reflection else "non_reflection"
    return BranchIdeal(e.index, kind, tuple(B.gens), empty=B.is_unit(), global_empty=B.is_unit(), dim=dim)


# -- K2 charts -----------------------------------------------------------------------


@dataclass
class K2Chart:
    j: int
    empty: bool
    dim: int
    closure_dim: int  # dimension of the part off the exceptional divisor (closure)
    exceptional_dim: int  # largest component inside the exceptional divisor, -1 if none


@dataclass
class K2Result:
    sigma: int
    charts: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return all(c.empty for c in self.charts)

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.charts), default=-1)

    @property
    def closure_dim(self) -> int:
        return max((c.closure_dim for c in self.charts), default=-1)

    @property
    def exceptional_dim(self) -> int:
        return max((c.exceptional_dim for c in self.charts), default=-1)


def _fresh(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def k2sigma_charts(f: ReflMapping, sigma, *, budget=None) -> K2Result:
    """Affine charts v_j = 1 of the branch K_2^sigma of the double point space.

    In each chart the ideal is generated by L(u), the forms vanishing on the
    image of sigma - I evaluated at v, the 2x2 minors of (v | (sigma - I)u) and
    (alpha M^-1)(u) . ell(v), where ell((sigma - I)u) = M ell(u).
    """
    e = _sigma(f, sigma)
    F = f.field
    p = f.p
    alpha = alpha_sigma(f, e)
    M = e.ell_matrix_M
    Minv = mat_inverse(M)
    k = len(M)
    A = [[sum((row[t] * Minv[t][c] for t in range(k)), Poly.zero(f.ctx, F)) for c in range(k)] for row in alpha]
    vnames = []
    taken = set(f.ctx.names)
    for i in range(p):
        vnames.append(_fresh(f"v{i + 1}", taken))
        taken.add(vnames[-1])
    A_diff = [[e.matrix[i][j] - (1 if i == j else 0) for j in range(p)] for i in range(p)]
    result = K2Result(e.index)
    for j in range(p):
        others = [vnames[i] for i in range(p) if i != j]
        ctx = f.ctx.extend(others, "projective")
        one = Poly.const(ctx, F, 1)
        v = [one if i == j else Poly.var(ctx, F, vnames[i]) for i in range(p)]
        u = [Poly.var(ctx, F, name) for name in f.space]
        w = [sum((u[c] * A_diff[i][c] for c in range(p) if A_diff[i][c]), Poly.zero(ctx, F)) for i in range(p)]

        def form(row, vec):
            return sum((vec[c] * row[c] for c in range(p) if row[c]), Poly.zero(ctx, F))

        gens = [l.embed(ctx) for l in f.L]
        gens += [form(r, v) for r in e.ell_perp_rows]
        gens += [v[a] * w[b] - v[b] * w[a] for a in range(p) for b in range(a + 1, p)]
        ellv = [form(r, v) for r in e.ell_rows]
        for row in A:
            gens.append(sum((a.embed(ctx) * lv for a, lv in zip(row, ellv)), Poly.zero(ctx, F)))
        gens = [g for g in gens if not g.is_zero()] or [Poly.zero(ctx, F)]
        B = groebner(gens, DEGREVLEX, budget=budget)
        if B.is_unit():
            result.charts.append(K2Chart(j, True, -1, -1, -1))
            continue
        dim = krull_dim(B)
        wj = w[j]
        closure = saturate(list(B.gens), wj, budget=budget)
        closure_dim = krull_dim(closure)
        K = list(B.gens) + [wj]
        if closure.is_unit():
            exc = krull_dim(groebner(K, DEGREVLEX, budget=budget))
        else:
            exc = -1
            for g in closure.gens:
                exc = max(exc, krull_dim(saturate(K, g, budget=budget)))
        result.charts.append(K2Chart(j, False, dim, closure_dim, exc))
    return result


# -- identities ------------------------------------------------------------------------


def check_identities(f: ReflMapping, g: Poly | None = None) -> dict:
    """Evaluate the structural identities linking L, lambda, ell, omega and g."""
    out = {}
    G = f.group
    ctx, F = f.ctx, f.field
    lhs = Poly.const(ctx, F, 1)
    rhs = Poly.const(ctx, F, 1)
    prod_lam = Poly.const(ctx, F, 1)
    prod_sL = Poly.const(ctx, F, 1)
    for e in G.elements[1:]:
        b = branch_lambda(f, e.index)
        prod_lam = prod_lam * b.lam
        lhs = lhs * b.lam
        if e.is_reflection:
            lhs = lhs * e.ell[0].embed(ctx)
        rhs = rhs * sigma_difference(f, e)[0]
        prod_sL = prod_sL * act(e, f.L[0])
    out["product"] = lhs == rhs
    J = determinant([jacobian(w.embed(ctx), f.space) for w in f.omega.omegas])
    a = normal_form(prod_lam * J, f.L_basis)
    b = normal_form(prod_sL, f.L_basis)
    if a.is_zero() or b.is_zero():
        out["jacobian"] = a.is_zero() and b.is_zero()
    else:
        out["jacobian"] = a * b.leading()[1] == b * a.leading()[1]
    if g is not None:
        assign = {X: w.embed(ctx) for X, w in zip(f.target, f.omega.omegas)}
        gw = substitute(g, assign, ctx)
        P = orbit_product(f)
        out["image"] = gw * P.leading()[1] == P * gw.leading()[1]
    return out
