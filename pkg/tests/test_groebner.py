import random
from itertools import combinations_with_replacement, product

import pytest
from hypothesis import given, strategies as st

from reflmap.cyclotomic import make_field
from reflmap.groebner import (
    INFINITE,
    ResourceError,
    checks_done,
    eliminate,
    gb_settings,
    groebner,
    ideal_equal,
    krull_dim,
    monomial_krull_dim,
    monomial_quotient_dim,
    normal_form,
    quotient_dim,
    saturate,
)
from reflmap.orders import DEGREVLEX, LEX, block_elim
from reflmap.poly import Poly, VarContext, parse_poly

Q = make_field(1)
XY = VarContext.of(["x", "y"], "space")
XYZ = VarContext.of(["x", "y", "z"], "space")


def P(text, ctx=XY, F=Q):
    return parse_poly(text, ctx, F)


def test_linear_system_in_lex():
    B = groebner([P("x-y"), P("y-1")], LEX)
    assert list(B.gens) == [P("x-1"), P("y-1")]


def test_quotient_dimension_of_two_conics():
    B = groebner([P("x^2+y^2"), P("x*y")])
    assert sorted(B.leading_monomials()) == [(0, 3), (1, 1), (2, 0)]
    assert quotient_dim(B) == 4
    assert krull_dim(B) == 0


def test_twisted_cubic_implicitization():
    ctx = VarContext(("t", "X", "Y"), ("auxiliary", "target", "target"))
    g = eliminate([P("X-t^2", ctx), P("Y-t^3", ctx)], ["t"])
    assert len(g) == 1
    assert g[0] == P("X^3-Y^2", VarContext(("X", "Y"), ("target", "target"))) or g[0] == -P(
        "X^3-Y^2", VarContext(("X", "Y"), ("target", "target"))
    )


def test_unit_and_zero_ideals():
    assert groebner([P("x"), P("x+1")]).is_unit()
    assert krull_dim(groebner([P("1")])) == -1
    assert krull_dim(groebner([P("0")])) == 2
    assert quotient_dim(groebner([P("x")])) == INFINITE


def test_saturation_removes_embedded_component():
    # <x*y, y^2> = <y> cap <x, y^2>; saturating by x leaves <y>
    S = saturate([P("x*y"), P("y^2")], P("x"))
    assert list(S.gens) == [P("y")]


def test_cyclotomic_coefficients():
    F = make_field(8)
    a = parse_poly("x^2-2", XY, F)
    b = parse_poly("x-(z-z^3)", XY, F)
    B = groebner([a, b * parse_poly("y", XY, F)])
    assert normal_form(parse_poly("(x-z+z^3)*y*x", XY, F), B).is_zero()


def test_step_budget_is_enforced():
    with gb_settings(step_budget=3):
        with pytest.raises(ResourceError):
            groebner([P("x^5-y^3", XYZ), P("x*y*z-1", XYZ), P("y^4-z^2+x", XYZ)])


def test_block_order_eliminates_first_block():
    G = groebner([P("x-y^2", XYZ), P("z-y^3", XYZ)], block_elim(1))
    # no generator of the elimination ideal involves y once x is eliminated
    only_yz = [g for g in G.gens if "x" not in g.variables()]
    assert only_yz


def test_self_check_runs():
    before = checks_done()
    groebner([P("x^2-y"), P("x*y-1")])
    assert checks_done() > before


@pytest.mark.parametrize(
    "mons, n, dim, kd",
    [
        ([(2, 0), (0, 3)], 2, 6, 0),
        ([(1, 1)], 2, INFINITE, 1),
        ([(0, 0)], 2, 0, -1),
        ([(1, 0, 0), (0, 1, 0)], 3, INFINITE, 1),
        ([(1, 1, 0), (0, 1, 1), (1, 0, 1)], 3, INFINITE, 1),
        ([(2, 0, 0), (0, 2, 0), (0, 0, 2)], 3, 8, 0),
    ],
)
def test_monomial_combinatorics(mons, n, dim, kd):
    assert monomial_quotient_dim(mons, n) == dim
    assert monomial_krull_dim(mons, n) == kd


# -- ideal-level properties ---------------------------------------------------

coeffs = st.integers(-4, 4)


@st.composite
def small_ideals(draw):
    gens = []
    for _ in range(draw(st.integers(1, 3))):
        terms = draw(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), coeffs), min_size=1, max_size=4))
        p = sum((Poly.const(XY, Q, c) * Poly.var(XY, Q, "x", i) * Poly.var(XY, Q, "y", j) for i, j, c in terms),
                Poly.zero(XY, Q))
        if not p.is_zero():
            gens.append(p)
    if not gens:
        gens = [P("x")]
    return gens


@given(small_ideals(), st.randoms(use_true_random=False))
def test_basis_independent_of_generator_order(gens, rnd):
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    assert groebner(gens).gens == groebner(shuffled).gens


@given(small_ideals(), small_ideals())
def test_products_of_generators_are_members(gens, others):
    B = groebner(gens)
    for g in gens:
        for h in others:
            assert normal_form(g * h, B).is_zero()


@given(small_ideals())
def test_reduced_basis_is_monic_and_interreduced(gens):
    B = groebner(gens)
    lms = B.leading_monomials()
    for i, g in enumerate(B.gens):
        assert g.leading(DEGREVLEX)[1] == 1
        others = B.gens[:i] + B.gens[i + 1:]
        for e in g.terms:
            assert not any(all(a <= b for a, b in zip(lm, e)) for j, lm in enumerate(lms) if j != i)
        assert len(others) == len(B.gens) - 1


@given(small_ideals())
def test_lex_and_degrevlex_agree_on_the_ideal(gens):
    lex = groebner(gens, LEX)
    assert ideal_equal(list(lex.gens), gens)


# -- brute-force staircase oracle ---------------------------------------------

PRIME = (1 << 61) - 1


def _monomials(nvars, deg):
    out = []
    for d in range(deg + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def _rank_mod_p(rows, ncols):
    rows = [r[:] for r in rows]
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, PRIME)
        pr = [(v * inv) % PRIME for v in rows[rank]]
        rows[rank] = pr
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * b) % PRIME for a, b in zip(rows[i], pr)]
        rank += 1
    return rank


def macaulay_quotient_dim(gens, nvars, D):
    """dim of polynomials of degree <= D modulo the degree-truncated span of the ideal."""
    cols = _monomials(nvars, D)
    index = {m: i for i, m in enumerate(cols)}
    rows = []
    for g in gens:
        dg = g.total_degree()
        for m in _monomials(nvars, D - dg):
            row = [0] * len(cols)
            for e, c in g.terms.items():
                q = c.rational()
                row[index[tuple(a + b for a, b in zip(e, m))]] = int(q.numerator) * pow(int(q.denominator), -1, PRIME) % PRIME
            rows.append(row)
    return len(cols) - _rank_mod_p(rows, len(cols))


def _random_zero_dim_ideal(rng, ctx):
    n = ctx.nvars
    gens = []
    for i in range(n):
        a = rng.randint(1, 3 if n == 3 else 4)
        e = [0] * n
        e[i] = a
        terms = {tuple(e): 1}
        for _ in range(rng.randint(0, 3)):
            m = tuple(rng.randint(0, a - 1) for _ in range(n))
            if sum(m) < a:
                terms[m] = rng.randint(-3, 3)
        gens.append(Poly(ctx, Q, {k: Q(v) for k, v in terms.items() if v}, _clean=True))
    extra = {tuple(rng.randint(0, 2) for _ in range(n)): rng.randint(-3, 3) for _ in range(3)}
    p = Poly(ctx, Q, {k: Q(v) for k, v in extra.items() if v}, _clean=True)
    if not p.is_zero() and p.total_degree() <= 4:
        gens.append(p)
    return gens


@pytest.mark.parametrize("seed", range(25))
def test_quotient_dim_matches_macaulay_oracle(seed):
    rng = random.Random(seed)
    ctx = XY if seed % 2 == 0 else XYZ
    gens = _random_zero_dim_ideal(rng, ctx)
    B = groebner(gens)
    ours = quotient_dim(B)
    D = 12 if ctx.nvars == 2 else 9
    a, b = macaulay_quotient_dim(gens, ctx.nvars, D), macaulay_quotient_dim(gens, ctx.nvars, D + 1)
    assert a == b, "truncation degree too small for the oracle"
    assert ours == a
