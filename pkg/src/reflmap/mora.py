"""Local standard bases at the origin (Mora's tangent cone algorithm)."""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .groebner import (
    GroebnerCheckError,
    IdealBasis,
    StepBudget,
    _disjoint,
    _divides,
    _lcm,
    _count_check,
    _sub,
    current_settings,
    from_raw,
    to_raw,
)
from .orders import LOCAL, MonOrder
from .poly import Poly

__all__ = ["mora_normal_form", "standard_basis"]


class _LP:
    __slots__ = ("terms", "lm", "lc", "ecart")

    def __init__(self, terms: dict, key):
        self.terms = terms
        self.lm = max(terms, key=key)
        self.lc = terms[self.lm]
        self.ecart = max(sum(e) for e in terms) - sum(self.lm)


def _corner_degree(lms, nvars: int):
    """Smallest D with every monomial of degree D in the monomial ideal, or None.

    When the leading ideal of a local ideal contains all monomials of degree D,
    Nakayama puts that power of the maximal ideal inside the ideal, so terms of
    degree D and above can be dropped.
    """
    powers = [None] * nvars
    for m in lms:
        support = [i for i, a in enumerate(m) if a]
        if len(support) == 1:
            i = support[0]
            powers[i] = m[i] if powers[i] is None else min(powers[i], m[i])
    if None in powers:
        return None
    top, seen, todo = 0, {tuple([0] * nvars)}, [tuple([0] * nvars)]
    while todo:
        m = todo.pop()
        top = max(top, sum(m))
        for i in range(nvars):
            n = m[:i] + (m[i] + 1,) + m[i + 1:]
            if n not in seen and not any(_divides(l, n) for l in lms):
                seen.add(n)
                todo.append(n)
    return top + 1


def _truncate(h: dict, D) -> dict:
    if D is None:
        return h
    return {m: c for m, c in h.items() if sum(m) < D}


def _cut(g: _LP, D, key) -> _LP:
    # an element swallowed by the truncation is replaced by its leading monomial, which lies in the ideal
    t = _truncate(g.terms, D)
    return _LP(t, key) if t else _LP({g.lm: g.lc}, key)


def _nf(h: dict, G: Sequence[_LP], key, budget: StepBudget, D=None) -> dict:
    """Weak normal form: the result is zero or has a leading monomial outside L(G)."""
    T = list(G)
    h = _truncate(dict(h), D)
    while h:
        lp = _LP(h, key)
        best = None
        for g in T:
            if _divides(g.lm, lp.lm) and (best is None or g.ecart < best.ecart):
                best = g
        if best is None:
            return h
        budget.spend()
        if best.ecart > lp.ecart:
            T.append(lp)
        q = lp.lc / best.lc
        shift = _sub(lp.lm, best.lm)
        new = dict(h)
        for m, c in best.terms.items():
            m2 = tuple(x + y for x, y in zip(m, shift))
            v = new.get(m2)
            v = -(q * c) if v is None else v - q * c
            if v:
                new[m2] = v
            else:
                new.pop(m2, None)
        h = _truncate(new, D)
    return h


def _spoly(a: _LP, b: _LP) -> dict:
    L = _lcm(a.lm, b.lm)
    sa, sb = _sub(L, a.lm), _sub(L, b.lm)
    out = {}
    for m, c in a.terms.items():
        out[tuple(x + y for x, y in zip(m, sa))] = c / a.lc
    for m, c in b.terms.items():
        m2 = tuple(x + y for x, y in zip(m, sb))
        v = out.get(m2, 0) - c / b.lc
        if v:
            out[m2] = v
        else:
            out.pop(m2, None)
    return out


def _standard_raw(polys, key, budget):
    S = [_LP(p, key) for p in polys if p]
    for g in S:
        if not any(g.lm):
            return [{g.lm: 1}]
    nvars = len(S[0].lm) if S else 0
    D = _corner_degree([g.lm for g in S], nvars)
    if D is not None:
        S = [_cut(g, D, key) for g in S]
    pairs = list(combinations(range(len(S)), 2))

    def pkey(pr):
        i, j = pr
        return (sum(_lcm(S[i].lm, S[j].lm)), i, j)

    while pairs:
        best = min(pairs, key=pkey)
        pairs.remove(best)
        i, j = best
        if _disjoint(S[i].lm, S[j].lm):
            continue
        budget.spend()
        h = _nf(_spoly(S[i], S[j]), S, key, budget, D)
        if h:
            lp = _LP(h, key)
            if not any(lp.lm):
                return [{lp.lm: 1}]
            pairs.extend((k, len(S)) for k in range(len(S)))
            S.append(lp)
            newD = _corner_degree([g.lm for g in S], nvars)
            if newD is not None and (D is None or newD < D):
                D = newD
                S = [_cut(g, D, key) for g in S]
    # minimal basis, each element scaled to leading coefficient one
    S.sort(key=lambda g: (sum(g.lm), tuple(-x for x in key(g.lm))))
    out = []
    for g in S:
        if not any(_divides(h.lm, g.lm) for h in out):
            out.append(g)
    return [{e: c / g.lc for e, c in g.terms.items()} for g in out]


def _check(basis, inputs, key):
    _count_check()
    budget = StepBudget(10**12)
    G = [_LP(b, key) for b in basis]
    D = _corner_degree([g.lm for g in G], len(G[0].lm)) if G else None
    for p in inputs:
        if p and _nf(p, G, key, budget, D):
            raise GroebnerCheckError("an input does not reduce to zero in the local ring")
    for a, b in combinations(G, 2):
        if not _disjoint(a.lm, b.lm) and _nf(_spoly(a, b), G, key, budget, D):
            raise GroebnerCheckError("a local S-polynomial does not reduce to zero")


def standard_basis(gens: Sequence[Poly], order: MonOrder = LOCAL, *, budget: StepBudget | None = None) -> IdealBasis:
    """Standard basis of the ideal generated in the localization at the origin."""
    if not order.is_local:
        raise ValueError("standard_basis expects a local order")
    gens = list(gens)
    ctx, F = gens[0].ctx, gens[0].field
    budget = budget or StepBudget()
    raw, rational = to_raw(gens)
    key = order.keyfunc()
    out = _standard_raw(raw, key, budget)
    if current_settings().self_check:
        _check(out, raw, key)
    polys = tuple(from_raw(d, ctx, F, rational) for d in out)
    return IdealBasis(polys, order, False, ctx, F)


def mora_normal_form(p: Poly, gens: Sequence[Poly], order: MonOrder = LOCAL, *, budget: StepBudget | None = None) -> Poly:
    """Mora normal form of ``p``; zero exactly when p lies in the local ideal, given a standard basis."""
    budget = budget or StepBudget()
    gens = [g for g in gens if g]
    raw, rational = to_raw([p, *gens])
    key = order.keyfunc()
    G = [_LP(d, key) for d in raw[1:]]
    r = _nf(raw[0], G, key, budget)
    return from_raw(r, p.ctx, p.field, rational)
