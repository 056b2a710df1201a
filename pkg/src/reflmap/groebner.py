"""Buchberger's algorithm and the ideal operations built on it.

Coefficients are converted once to a raw representation: ``gmpy2.mpq`` when
every input coefficient is rational (the common case), ``CycloElem`` otherwise.
The engine only needs ``+ - * /`` and truthiness from them.
"""

from __future__ import annotations

import contextlib
import contextvars
import heapq
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .orders import DEGREVLEX, MonOrder, block_elim
from .poly import Poly, VarContext

__all__ = [
    "ResourceError",
    "GroebnerCheckError",
    "GBSettings",
    "StepBudget",
    "gb_settings",
    "current_settings",
    "IdealBasis",
    "INFINITE",
    "groebner",
    "normal_form",
    "eliminate",
    "saturate",
    "ideal_equal",
    "quotient_dim",
    "krull_dim",
    "monomial_quotient_dim",
    "monomial_krull_dim",
]

INFINITE = float("inf")


class ResourceError(RuntimeError):
    """The configured step budget was exhausted."""


class GroebnerCheckError(AssertionError):
    """A computed basis failed its self-check."""


@dataclass(frozen=True)
class GBSettings:
    step_budget: int = 10**6
    self_check: bool = False


_SETTINGS: contextvars.ContextVar = contextvars.ContextVar("gb_settings", default=GBSettings())


def current_settings() -> GBSettings:
    return _SETTINGS.get()


@contextlib.contextmanager
def gb_settings(**changes):
    """Temporarily override the step budget or the self-check flag."""
    new = GBSettings(**{**current_settings().__dict__, **changes})
    token = _SETTINGS.set(new)
    try:
        yield new
    finally:
        _SETTINGS.reset(token)


class StepBudget:
    def __init__(self, steps: int | None = None):
        self.limit = current_settings().step_budget if steps is None else steps
        self.used = 0

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise ResourceError(f"step budget of {self.limit} reduction steps exhausted")


# -- raw representation ------------------------------------------------------


def to_raw(polys: Sequence[Poly]):
    """Return (list of dicts, rational_mode)."""
    rational = all(p.is_rational() for p in polys)
    if rational:
        return [{e: c.rational() for e, c in p.terms.items()} for p in polys], True
    return [dict(p.terms) for p in polys], False


def from_raw(d: dict, ctx: VarContext, field, rational: bool) -> Poly:
    if rational:
        return Poly(ctx, field, {e: field(c) for e, c in d.items()}, _clean=True)
    return Poly(ctx, field, dict(d), _clean=True)


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _disjoint(a, b):
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


class _GP:
    """A basis element in raw form: monic, with cached leading monomial."""

    __slots__ = ("terms", "lm", "tail", "sugar")

    def __init__(self, terms: dict, key, sugar: int):
        lm = max(terms, key=key)
        lc = terms[lm]
        if lc != 1:
            inv = 1 / lc
            terms = {e: c * inv for e, c in terms.items()}
        self.terms = terms
        self.lm = lm
        self.tail = [(e, c) for e, c in terms.items() if e != lm]
        self.sugar = sugar


def reduce_full(f: dict, G: Sequence[_GP], key, budget: StepBudget) -> dict:
    """Complete reduction of ``f`` modulo ``G`` for a global order."""
    if not f or not G:
        return dict(f)
    f = dict(f)
    neg = lambda e: tuple(-x for x in key(e))  # noqa: E731
    heap = [(neg(e), e) for e in f]
    heapq.heapify(heap)
    rem = {}
    lms = [g.lm for g in G]
    while heap:
        _, e = heapq.heappop(heap)
        c = f.pop(e, None)
        if c is None:
            continue
        g = None
        for i, m in enumerate(lms):
            if _divides(m, e):
                g = G[i]
                break
        if g is None:
            rem[e] = c
            continue
        budget.spend()
        shift = _sub(e, g.lm)
        for m, gc in g.tail:
            m2 = tuple(x + y for x, y in zip(m, shift))
            v = f.get(m2)
            if v is None:
                f[m2] = -(c * gc)
                heapq.heappush(heap, (neg(m2), m2))
            else:
                v = v - c * gc
                if v:
                    f[m2] = v
                else:
                    del f[m2]
    return rem


def _spoly(f: _GP, g: _GP) -> dict:
    L = _lcm(f.lm, g.lm)
    sf, sg = _sub(L, f.lm), _sub(L, g.lm)
    out = {}
    for m, c in f.tail:
        out[tuple(x + y for x, y in zip(m, sf))] = c
    for m, c in g.tail:
        m2 = tuple(x + y for x, y in zip(m, sg))
        v = out.get(m2)
        if v is None:
            out[m2] = -c
        else:
            v = v - c
            if v:
                out[m2] = v
            else:
                del out[m2]
    return out


def _update(f, G, B, ih):
    """Gebauer-Moeller installation of f[ih] into basis G and pair list B."""
    mh = f[ih].lm
    C = list(G)
    D = []
    while C:
        ig = C.pop(0)
        mg = f[ig].lm
        LCMhg = _lcm(mh, mg)

        def lcm_divides(ip):
            return _divides(_lcm(mh, f[ip].lm), LCMhg)

        if _disjoint(mh, mg) or (
            not any(lcm_divides(ipx) for ipx in C) and not any(lcm_divides(pr[1]) for pr in D)
        ):
            D.append((ih, ig))
    E = [(a, b) for a, b in D if not _disjoint(mh, f[b].lm)]
    B_new = []
    for ig1, ig2 in B:
        m1, m2 = f[ig1].lm, f[ig2].lm
        L12 = _lcm(m1, m2)
        if not _divides(mh, L12) or _lcm(m1, mh) == L12 or _lcm(m2, mh) == L12:
            B_new.append((ig1, ig2))
    B_new.extend(E)
    G_new = [ig for ig in G if not _divides(mh, f[ig].lm)]
    G_new.append(ih)
    return G_new, B_new


def _pair_key(f, key, pair):
    i, j = pair
    L = _lcm(f[i].lm, f[j].lm)
    di = sum(L) - sum(f[i].lm)
    dj = sum(L) - sum(f[j].lm)
    sugar = max(f[i].sugar + di, f[j].sugar + dj)
    return (key(L), sugar, min(i, j), max(i, j))


def buchberger_raw(polys: Sequence[dict], order: MonOrder, budget: StepBudget) -> list:
    """Reduced monic Groebner basis of raw polynomials, sorted by decreasing leading monomial."""
    key = order.keyfunc()
    inputs = [(p, i) for i, p in enumerate(polys) if p]
    if not inputs:
        return []
    inputs.sort(key=lambda t: (key(max(t[0], key=key)), t[1]))
    f: list = []
    G: list = []
    B: list = []
    for p, _ in inputs:
        r = reduce_full(p, [f[i] for i in G], key, budget)
        if not r:
            continue
        gp = _GP(r, key, max(sum(e) for e in r))
        if not any(gp.lm):
            return [{gp.lm: gp.terms[gp.lm]}]
        f.append(gp)
        G, B = _update(f, G, B, len(f) - 1)
        while B:
            best = min(B, key=lambda pr: _pair_key(f, key, pr))
            B.remove(best)
            i, j = best
            budget.spend()
            sugar = _pair_key(f, key, best)[1]
            h = reduce_full(_spoly(f[i], f[j]), [f[k] for k in G], key, budget)
            if h:
                gp = _GP(h, key, sugar)
                if not any(gp.lm):
                    return [{gp.lm: gp.terms[gp.lm]}]
                f.append(gp)
                G, B = _update(f, G, B, len(f) - 1)
    # minimal then reduced basis
    basis = [f[i] for i in G]
    basis.sort(key=lambda g: key(g.lm))
    minimal = []
    for g in basis:
        if not any(_divides(h.lm, g.lm) for h in minimal):
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        tail = reduce_full(dict(g.tail), others, key, budget)
        tail[g.lm] = g.terms[g.lm]
        out.append(tail)
    out.sort(key=lambda d: key(max(d, key=key)), reverse=True)
    return out


_checks_done = 0


def checks_done() -> int:
    """Number of bases verified by the self-check so far in this process."""
    return _checks_done


def _count_check() -> None:
    global _checks_done
    _checks_done += 1


def check_basis_raw(basis: Sequence[dict], inputs: Sequence[dict], order: MonOrder) -> None:
    _count_check()
    key = order.keyfunc()
    budget = StepBudget(10**12)
    G = [_GP(dict(b), key, 0) for b in basis]
    for p in inputs:
        if p and reduce_full(p, G, key, budget):
            raise GroebnerCheckError("an input generator does not reduce to zero")
    for a, b in combinations(G, 2):
        if _disjoint(a.lm, b.lm):
            continue
        if reduce_full(_spoly(a, b), G, key, budget):
            raise GroebnerCheckError("an S-polynomial does not reduce to zero")


# -- public interface ----------------------------------------------------------


@dataclass(frozen=True)
class IdealBasis:
    """Generators of an ideal together with the order they are a basis for."""

    gens: tuple
    order: MonOrder
    reduced_flag: bool
    ctx: VarContext = field(compare=False)
    ring_field: object = field(compare=False, repr=False)

    def leading_monomials(self) -> list:
        return [g.leading(self.order)[0] for g in self.gens]

    def is_unit(self) -> bool:
        return any(not any(m) for m in self.leading_monomials())

    def is_zero_ideal(self) -> bool:
        return not self.gens

    def reduce(self, p: Poly, budget: StepBudget | None = None) -> Poly:
        return normal_form(p, self, budget)

    def contains(self, p: Poly) -> bool:
        return normal_form(p, self).is_zero()

    def quotient_dim(self):
        return quotient_dim(self)

    def krull_dim(self) -> int:
        return krull_dim(self)

    def __str__(self):
        return "[" + ", ".join(str(g) for g in self.gens) + "]"


def groebner(gens: Sequence[Poly], order: MonOrder = DEGREVLEX, *, budget: StepBudget | None = None) -> IdealBasis:
    """Reduced Groebner basis for a global order.

    Generators are inserted one at a time in increasing leading-monomial order
    (input position breaks ties), each fully reduced first; after every
    insertion the pair queue is emptied using the normal strategy with sugar
    degree and pair indices as tie-breaks.
    """
    if order.is_local:
        raise ValueError("groebner needs a global order; use standard_basis for local orders")
    gens = [g for g in gens]
    if not gens:
        raise ValueError("at least one generator is required (use the zero polynomial for the zero ideal)")
    ctx, F = gens[0].ctx, gens[0].field
    for g in gens:
        if g.ctx != ctx:
            raise ValueError("generators live in different contexts")
    budget = budget or StepBudget()
    raw, rational = to_raw(gens)
    out = buchberger_raw(raw, order, budget)
    if current_settings().self_check:
        check_basis_raw(out, raw, order)
    polys = tuple(from_raw(d, ctx, F, rational) for d in out)
    return IdealBasis(polys, order, True, ctx, F)


def normal_form(p: Poly, basis: IdealBasis, budget: StepBudget | None = None) -> Poly:
    if basis.order.is_local:
        from .mora import mora_normal_form

        return mora_normal_form(p, list(basis.gens), budget=budget)
    if p.ctx != basis.ctx:
        p = p.embed(basis.ctx)
    budget = budget or StepBudget()
    raw, rational = to_raw([p, *basis.gens])
    key = basis.order.keyfunc()
    G = [_GP(d, key, 0) for d in raw[1:]]
    r = reduce_full(raw[0], G, key, budget)
    return from_raw(r, basis.ctx, basis.ring_field, rational)


def ideal_equal(a: Sequence[Poly], b: Sequence[Poly], order: MonOrder = DEGREVLEX) -> bool:
    return groebner(a, order).gens == groebner(b, order).gens


def eliminate(gens: Sequence[Poly], drop: Iterable[str], *, budget: StepBudget | None = None) -> list:
    """Groebner basis of the elimination ideal, as polynomials in the kept variables.

    Variables keep their relative order; the result lives in the context of
    the remaining variables (an empty list denotes the zero ideal).
    """
    gens = list(gens)
    ctx, F = gens[0].ctx, gens[0].field
    drop = set(drop)
    for d in drop:
        ctx.index(d)
    dropped = [n for n in ctx.names if n in drop]
    kept = [n for n in ctx.names if n not in drop]
    if not kept:
        raise ValueError("cannot eliminate every variable")
    roles = dict(zip(ctx.names, ctx.roles))
    big = VarContext(tuple(dropped + kept), tuple(roles[n] for n in dropped + kept))
    small = VarContext(tuple(kept), tuple(roles[n] for n in kept))
    G = groebner([g.embed(big) for g in gens], block_elim(len(dropped)), budget=budget)
    k = len(dropped)
    out = []
    for g in G.gens:
        if all(not any(e[:k]) for e in g.terms):
            out.append(_restrict(g, small, k))
    return out


def _restrict(g: Poly, small: VarContext, k: int) -> Poly:
    return Poly(small, g.field, {e[k:]: c for e, c in g.terms.items()}, _clean=True)


def saturate(gens: Sequence[Poly], f: Poly, *, budget: StepBudget | None = None) -> IdealBasis:
    """Degrevlex basis of the saturation I : f^infinity (Rabinowitsch trick)."""
    gens = list(gens)
    ctx, F = gens[0].ctx, gens[0].field
    tname = "_sat_t"
    while tname in ctx.names:
        tname += "_"
    big = VarContext((tname,) + ctx.names, ("auxiliary",) + ctx.roles)
    t = Poly.var(big, F, tname)
    lifted = [g.embed(big) for g in gens] + [1 - t * f.embed(big)]
    G = groebner(lifted, block_elim(1), budget=budget)
    kept = [_restrict(g, ctx, 1) for g in G.gens if all(e[0] == 0 for e in g.terms)]
    if not kept:
        kept = [Poly.zero(ctx, F)]
    return groebner(kept, DEGREVLEX, budget=budget)


# -- combinatorics of leading ideals -------------------------------------------


def _minimal_monomials(mons):
    mons = sorted(set(mons), key=sum)
    out = []
    for m in mons:
        if not any(_divides(a, m) for a in out):
            out.append(m)
    return out


def monomial_quotient_dim(mons: Sequence[tuple], nvars: int):
    """Number of monomials outside the monomial ideal generated by ``mons``."""
    mons = _minimal_monomials(mons)
    if any(not any(m) for m in mons):
        return 0
    bounds = []
    for i in range(nvars):
        pure = [m[i] for m in mons if m[i] and all(x == 0 for j, x in enumerate(m) if j != i)]
        if not pure:
            return INFINITE
        bounds.append(min(pure))
    return _count_outside(mons, bounds)


def _count_outside(mons, bounds):
    # recursive slicing on the last variable keeps this fast for moderate boxes
    if len(bounds) == 1:
        return min([m[0] for m in mons] + [bounds[0]])
    total = 0
    last = len(bounds) - 1
    for k in range(bounds[last]):
        sl = [m[:last] for m in mons if m[last] <= k]
        sl = _minimal_monomials(sl)
        if any(not any(m) for m in sl):
            continue
        total += _count_outside(sl, bounds[:last])
    return total


def monomial_krull_dim(mons: Sequence[tuple], nvars: int) -> int:
    mons = _minimal_monomials(mons)
    if any(not any(m) for m in mons):
        return -1
    supports = [frozenset(i for i, x in enumerate(m) if x) for m in mons]
    for size in range(nvars, -1, -1):
        for S in combinations(range(nvars), size):
            s = frozenset(S)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def quotient_dim(basis: IdealBasis):
    if not basis.gens:
        return INFINITE
    return monomial_quotient_dim(basis.leading_monomials(), basis.ctx.nvars)


def krull_dim(basis: IdealBasis) -> int:
    if not basis.gens:
        return basis.ctx.nvars
    return monomial_krull_dim(basis.leading_monomials(), basis.ctx.nvars)
