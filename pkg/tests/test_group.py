from math import lcm

import pytest
from hypothesis import given, strategies as st

from reflmap.cyclotomic import make_field
from reflmap.group import (
    GroupCapError,
    GroupError,
    OrbitMap,
    act,
    builtin_group,
    close_group,
    extend_trivially,
    verify_orbit_map,
)
from reflmap.poly import VarContext, parse_poly

F8 = make_field(8)


@pytest.fixture(scope="module")
def d8():
    return builtin_group("dihedral_D8", F8)


@pytest.fixture(scope="module")
def s4():
    return builtin_group("tetrahedral_S4", F8)


@pytest.mark.parametrize(
    "name, N, orders, order, refl",
    [
        ("dihedral_D8", 8, None, 8, 4),
        ("tetrahedral_S4", 8, None, 24, 6),
        ("cyclic_product", 30, (2, 3, 5), 30, 1 + 2 + 4),
        ("cyclic_product", 4, (4, 4), 16, 3 + 3),
        ("cyclic_product", 1, (1, 1), 1, 0),
    ],
)
def test_orders_and_reflection_counts(name, N, orders, order, refl):
    G, om = builtin_group(name, make_field(N), orders=orders)
    assert G.order == order
    assert len(G.reflections) == refl
    assert G.elements[0].is_identity
    assert verify_orbit_map(G, om).ok


def test_degrees_multiply_to_the_order(d8, s4):
    for G, om in (d8, s4):
        prod = 1
        for d in om.degrees:
            prod *= d
        assert prod == G.order
        assert sum(d - 1 for d in om.degrees) == len(G.reflections)


def test_multiplication_table_is_a_latin_square(s4):
    G, _ = s4
    T = G.mult_table
    n = G.order
    for i in range(n):
        assert sorted(T[i]) == list(range(n))
        assert sorted(T[j][i] for j in range(n)) == list(range(n))
        assert T[0][i] == i == T[i][0]
        assert T[i][G.inverse_index(i)] == 0


def test_associativity(d8):
    G, _ = d8
    T = G.mult_table
    n = G.order
    assert all(T[T[a][b]][c] == T[a][T[b][c]] for a in range(n) for b in range(n) for c in range(n))


def test_fixed_space_dimensions(s4):
    G, _ = s4
    dims = sorted(e.fix_dim for e in G.elements)
    # identity, six reflections, and 17 elements fixing only the origin or a line
    assert dims.count(3) == 1
    assert dims.count(2) == 6
    assert dims.count(1) == 3 + 8


def test_cyclic_exponent_round_trip():
    G, _ = builtin_group("cyclic_product", make_field(30), orders=(2, 3, 5))
    for i in range(G.order):
        assert G.index_of_exponents(G.exponents(i)) == i
    a, b = G.index_of_exponents((1, 2, 3)), G.index_of_exponents((1, 2, 4))
    assert G.exponents(G.mul(a, b)) == (0, 1, 2)


def test_action_convention(d8):
    # (sigma H)(u) = H(sigma^-1 u): acting by g then h is acting by h g
    G, _ = d8
    H = parse_poly("u^3+2*u*v^2+v", G.space_ctx, F8)
    for g in range(G.order):
        for h in range(G.order):
            assert act(G.elements[h], act(G.elements[g], H)) == act(G.elements[G.mul(h, g)], H)


def test_rotation_acts_on_a_linear_form(d8):
    G, _ = d8
    ctx = G.space_ctx
    rot = G.index_of_matrix(tuple(tuple(F8(x) for x in row) for row in [[0, -1], [1, 0]]))
    # sigma^-1 (u, v) = (v, -u), so u pulls back to v
    assert act(G.elements[rot], parse_poly("u", ctx, F8)) == parse_poly("v", ctx, F8)


def test_wrong_orbit_map_is_reported(d8):
    G, _ = d8
    bad = OrbitMap(tuple(parse_poly(s, G.space_ctx, F8) for s in ("u^2+v^2", "u*v")))
    rep = verify_orbit_map(G, bad)
    assert not rep.ok
    assert not rep.invariant
    assert rep.failures


def test_closure_cap():
    with pytest.raises(GroupCapError):
        builtin_group("tetrahedral_S4", F8, cap=10)
    with pytest.raises(GroupCapError):
        builtin_group("cyclic_product", make_field(2310), orders=(2, 3, 5, 7, 11), cap=1024)


def test_conductor_must_fit():
    with pytest.raises(GroupError):
        builtin_group("dihedral_D8", make_field(4))
    with pytest.raises(GroupError):
        builtin_group("cyclic_product", make_field(6), orders=(4,))


def test_closure_from_generators_matches_builtin(d8):
    G, _ = d8
    H = close_group([[[1, 0], [0, -1]], [[0, 1], [1, 0]]], F8, ["u", "v"])
    assert H.order == G.order
    assert len(H.reflections) == len(G.reflections)


def test_trivial_extension(d8):
    G, om = d8
    H, om2 = extend_trivially(G, om, ["w"])
    assert H.order == G.order and H.dim == 3
    assert om2.degrees == (2, 4, 1)
    assert verify_orbit_map(H, om2).ok
    assert all(e.fix_dim == f.fix_dim + 1 for e, f in zip(H.elements, G.elements))


@given(st.integers(0, 23), st.integers(0, 23))
def test_sigma_and_inverse_have_the_same_fixed_space(i, j):
    G, _ = builtin_group("tetrahedral_S4", F8)
    e = G.elements[i]
    assert G.elements[e.inverse_index].fix_dim == e.fix_dim
    assert G.mul(G.mul(i, j), G.inverse_index(j)) == i


@given(st.sampled_from([(2, 3), (4, 2), (3, 3, 2), (5,)]), st.data())
def test_orbit_map_is_invariant_under_every_element(orders, data):
    G, om = builtin_group("cyclic_product", make_field(lcm(*orders)), orders=orders)
    i = data.draw(st.integers(0, G.order - 1))
    for w in om.omegas:
        assert act(G.elements[i], w) == w
