"""Finite matrix reflection groups, their classification, and orbit maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import lcm
from typing import Sequence

from .cyclotomic import CycloElem, CycloField
from .poly import Poly, VarContext, determinant, jacobian, parse_poly, substitute

__all__ = [
    "GroupError",
    "GroupCapError",
    "GroupElem",
    "ReflGroup",
    "OrbitMap",
    "OrbitMapReport",
    "close_group",
    "act",
    "verify_orbit_map",
    "builtin_group",
    "extend_trivially",
    "rref",
    "mat_mul",
    "mat_inverse",
]


class GroupError(ValueError):
    pass


class GroupCapError(GroupError):
    """The group has more elements than the configured cap."""


# -- exact linear algebra over Q(zeta_N) ----------------------------------------


def mat_mul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = None
            for t in range(m):
                a, b = A[i][t], B[t][j]
                if a and b:
                    acc = a * b if acc is None else acc + a * b
            row.append(acc if acc is not None else A[0][0].field.zero())
        out.append(tuple(row))
    return tuple(out)


def rref(rows) -> tuple[list, list]:
    """Reduced row echelon form; returns (non-zero rows, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return [], []
    nrows, ncols = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def mat_inverse(A):
    n = len(A)
    F = A[0][0].field
    aug = [list(A[i]) + [F.one() if i == j else F.zero() for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(R) < n:
        raise GroupError("matrix is singular")
    return tuple(tuple(R[i][n:]) for i in range(n))


def _is_diagonal(A) -> bool:
    return all(not A[i][j] for i in range(len(A)) for j in range(len(A)) if i != j)


def _mat_key(A):
    return tuple(tuple(sorted(x._c.items())) for row in A for x in row)


# -- group elements -------------------------------------------------------------


class GroupElem:
    """One element of a ReflGroup; classification data is computed on first use."""

    def __init__(self, group: "ReflGroup", index: int, matrix):
        self.group = group
        self.index = index
        self.matrix = matrix

    @property
    def inverse_index(self) -> int:
        return self.group.inverse_index(self.index)

    @cached_property
    def _classes(self):
        A = self.matrix
        p = len(A)
        F = self.group.field
        diff = [[A[i][j] - (1 if i == j else 0) for j in range(p)] for i in range(p)]
        if _is_diagonal(A):
            piv = [i for i in range(p) if diff[i][i]]
            rows = [[F.one() if j == i else F.zero() for j in range(p)] for i in piv]
            perp_rows = [[F.one() if j == i else F.zero() for j in range(p)] for i in range(p) if i not in piv]
        else:
            rows, piv = rref(diff)
            transposed = [[diff[i][j] for i in range(p)] for j in range(p)]
            perp_rows = _null_space(transposed)
        # matrix M with ell((sigma - I) u) = M ell(u)
        Rd = [[sum((rows[k][t] * diff[t][j] for t in range(p)), F.zero()) for j in range(p)] for k in range(len(rows))]
        M = [[Rd[k][c] for c in piv] for k in range(len(rows))]
        return rows, piv, perp_rows, M

    @property
    def fix_dim(self) -> int:
        return len(self.matrix) - len(self._classes[0])

    @property
    def is_identity(self) -> bool:
        return self.index == 0

    @property
    def is_reflection(self) -> bool:
        return len(self._classes[0]) == 1

    @property
    def ell_rows(self) -> list:
        """Rows of the canonical (RREF) matrix whose forms cut out Fix."""
        return self._classes[0]

    @property
    def ell_perp_rows(self) -> list:
        """Forms whose common zero set is the image of (sigma - I)."""
        return self._classes[2]

    @property
    def ell_matrix_M(self) -> list:
        return self._classes[3]

    @cached_property
    def ell(self) -> tuple:
        return tuple(self.group.linear_form(r) for r in self.ell_rows)

    @cached_property
    def ell_perp(self) -> tuple:
        return tuple(self.group.linear_form(r) for r in self.ell_perp_rows)

    def __repr__(self):
        return f"GroupElem(index={self.index})"


def _null_space(A) -> list:
    """Basis (RREF-normalised) of {x : A x = 0}."""
    rows, piv = rref(A)
    n = len(A[0])
    F = A[0][0].field
    free = [j for j in range(n) if j not in piv]
    basis = []
    for fj in free:
        v = [F.zero()] * n
        v[fj] = F.one()
        for r, pc in zip(rows, piv):
            v[pc] = -r[fj]
        basis.append(v)
    R, _ = rref(basis) if basis else ([], [])
    return R


class ReflGroup:
    """A finite matrix group acting on the space variables ``space``.

    ``elements[0]`` is the identity.  For diagonal cyclic products the
    multiplication is done by exponent arithmetic; otherwise a lookup of the
    product matrix is used.
    """

    def __init__(self, field: CycloField, matrices: Sequence, space: Sequence[str], generators: Sequence[int],
                 cyclic_orders: tuple | None = None, extra_dims: int = 0):
        self.field = field
        self.dim = len(matrices[0])
        if len(space) != self.dim:
            raise GroupError(f"{len(space)} space variables for a group of dimension {self.dim}")
        self.space_ctx = VarContext.of(space, "space")
        self.elements = [GroupElem(self, i, m) for i, m in enumerate(matrices)]
        self.generators = tuple(generators)
        self.cyclic_orders = cyclic_orders
        self.extra_dims = extra_dims
        self._index = {_mat_key(m): i for i, m in enumerate(matrices)} if cyclic_orders is None else None
        self._inv: dict = {}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i) -> GroupElem:
        return self.elements[i]

    # -- index arithmetic ----------------------------------------------------
    def exponents(self, i: int) -> tuple:
        if self.cyclic_orders is None:
            raise GroupError("exponent vectors exist only for cyclic products")
        out = []
        for d in reversed(self.cyclic_orders):
            out.append(i % d)
            i //= d
        return tuple(reversed(out))

    def index_of_exponents(self, a: Sequence[int]) -> int:
        if self.cyclic_orders is None:
            raise GroupError("exponent vectors exist only for cyclic products")
        if len(a) != len(self.cyclic_orders):
            raise GroupError("wrong number of exponents")
        i = 0
        for x, d in zip(a, self.cyclic_orders):
            i = i * d + (x % d)
        return i

    def index_of_matrix(self, A) -> int:
        if self.cyclic_orders is not None:
            raise GroupError("matrix lookup is not available for cyclic products")
        try:
            return self._index[_mat_key(A)]
        except KeyError:
            raise GroupError("matrix is not a group element") from None

    def mul(self, i: int, j: int) -> int:
        if self.cyclic_orders is not None:
            a, b = self.exponents(i), self.exponents(j)
            return self.index_of_exponents([x + y for x, y in zip(a, b)])
        return self.index_of_matrix(mat_mul(self.elements[i].matrix, self.elements[j].matrix))

    def inverse_index(self, i: int) -> int:
        if i not in self._inv:
            if self.cyclic_orders is not None:
                self._inv[i] = self.index_of_exponents([-x for x in self.exponents(i)])
            else:
                self._inv[i] = self.index_of_matrix(mat_inverse(self.elements[i].matrix))
        return self._inv[i]

    @cached_property
    def mult_table(self) -> tuple:
        n = self.order
        return tuple(tuple(self.mul(i, j) for j in range(n)) for i in range(n))

    @cached_property
    def reflections(self) -> tuple:
        return tuple(e.index for e in self.elements[1:] if e.is_reflection)

    def report_ordering(self, mode: str = "paper") -> list:
        """Non-identity indices: reflections first (paper) or plain table order."""
        rest = range(1, self.order)
        if mode == "table":
            return list(rest)
        if mode != "paper":
            raise ValueError(f"unknown ordering {mode!r}")
        refl = set(self.reflections)
        return [i for i in rest if i in refl] + [i for i in rest if i not in refl]

    def linear_form(self, row) -> Poly:
        terms = {}
        for j, c in enumerate(row):
            if c:
                e = [0] * self.dim
                e[j] = 1
                terms[tuple(e)] = c
        return Poly(self.space_ctx, self.field, terms, _clean=True)


def close_group(generators: Sequence, field: CycloField, space: Sequence[str] | None = None, cap: int = 1024) -> ReflGroup:
    """Breadth-first closure of the generator matrices (left multiplication by generators)."""
    if not generators:
        raise GroupError("at least one generator is required")
    gens = [tuple(tuple(field(x) for x in row) for row in g) for g in generators]
    p = len(gens[0])
    for g in gens:
        if len(g) != p or any(len(r) != p for r in g):
            raise GroupError("generators must be square matrices of equal size")
        mat_inverse(g)  # raises on singular input
    ident = tuple(tuple(field(1 if i == j else 0) for j in range(p)) for i in range(p))
    elems = [ident]
    seen = {_mat_key(ident): 0}
    gen_idx = []
    i = 0
    while i < len(elems):
        for g in gens:
            m = mat_mul(g, elems[i])
            k = _mat_key(m)
            if k not in seen:
                if len(elems) >= cap:
                    raise GroupCapError(f"group not closed within cap {cap}")
                seen[k] = len(elems)
                elems.append(m)
        i += 1
    for g in gens:
        gen_idx.append(seen[_mat_key(g)])
    space = list(space) if space is not None else [f"u{k + 1}" for k in range(p)]
    return ReflGroup(field, elems, space, gen_idx)


def act(sigma: GroupElem, H: Poly) -> Poly:
    """(sigma H)(u) = H(sigma^-1 u) on the space variables; other variables are fixed."""
    G = sigma.group
    if sigma.index == 0:
        return H
    inv = G.elements[sigma.inverse_index].matrix
    ctx = H.ctx
    space = G.space_ctx.names
    for n in space:
        if n not in ctx.names:
            raise ValueError(f"space variable {n!r} missing from the polynomial context")
    assign = {}
    for i, name in enumerate(space):
        terms = {}
        for j, c in enumerate(inv[i]):
            if c:
                e = [0] * ctx.nvars
                e[ctx.index(space[j])] = 1
                terms[tuple(e)] = c
        assign[name] = Poly(ctx, H.field, terms, _clean=True)
    return substitute(H, assign, ctx)


# -- orbit maps ----------------------------------------------------------------


@dataclass(frozen=True)
class OrbitMap:
    omegas: tuple

    @property
    def degrees(self) -> tuple:
        return tuple(w.total_degree() for w in self.omegas)


@dataclass
class OrbitMapReport:
    invariant: bool
    jacobian_ok: bool
    homogeneous: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.invariant and self.jacobian_ok and self.homogeneous


def verify_orbit_map(G: ReflGroup, omega: OrbitMap) -> OrbitMapReport:
    failures = []
    ws = [w.embed(G.space_ctx) if w.ctx != G.space_ctx else w for w in omega.omegas]
    if len(ws) != G.dim:
        failures.append(f"expected {G.dim} invariants, got {len(ws)}")
        return OrbitMapReport(False, False, False, failures)
    invariant = True
    for gi in G.generators:
        for k, w in enumerate(ws):
            if act(G.elements[gi], w) != w:
                invariant = False
                failures.append(f"component {k + 1} is not invariant under generator {gi}")
    homogeneous = all(w.is_homogeneous() and not w.is_zero() for w in ws)
    if not homogeneous:
        failures.append("some component is not homogeneous")
    J = [jacobian(w, G.space_ctx.names) for w in ws]
    det = determinant(J)
    prod = Poly.const(G.space_ctx, G.field, 1)
    for r in G.reflections:
        prod = prod * G.elements[r].ell[0]
    jac_ok = False
    if not det.is_zero():
        _, a = det.leading()
        _, b = prod.leading()
        jac_ok = det * b == prod * a
    if not jac_ok:
        failures.append("Jacobian determinant is not a constant multiple of the product of reflecting hyperplanes")
    return OrbitMapReport(invariant, jac_ok, homogeneous, failures)


# -- builtin groups ----------------------------------------------------------------


def _check_conductor(field: CycloField, m: int, name: str):
    if field.N % m:
        raise GroupError(f"{name} needs a conductor divisible by {m}, got N={field.N}")


def builtin_group(name: str, field: CycloField, space: Sequence[str] | None = None,
                  orders: Sequence[int] | None = None, cap: int = 1024):
    """Return (group, orbit map) for cyclic_product, dihedral_D8 or tetrahedral_S4."""
    F = field
    if name == "cyclic_product":
        if not orders:
            raise GroupError("cyclic_product needs the list of orders")
        orders = tuple(int(d) for d in orders)
        if any(d < 1 for d in orders):
            raise GroupError("cyclic orders must be positive")
        _check_conductor(F, lcm(*orders), name)
        p = len(orders)
        total = 1
        for d in orders:
            total *= d
        if total > cap:
            raise GroupCapError(f"group order {total} exceeds the cap {cap}")
        space = list(space) if space is not None else [f"u{k + 1}" for k in range(p)]
        roots = [[F.zeta((F.N // d) * a) for a in range(d)] for d in orders]
        zero = F.zero()
        mats = []
        for idx in range(total):
            exps = []
            t = idx
            for d in reversed(orders):
                exps.append(t % d)
                t //= d
            exps.reverse()
            mats.append(tuple(tuple(roots[i][exps[i]] if i == j else zero for j in range(p)) for i in range(p)))
        gens = []
        for i in range(p):
            if orders[i] > 1:
                stride = 1
                for d in orders[i + 1:]:
                    stride *= d
                gens.append(stride)
        G = ReflGroup(F, mats, space, gens, cyclic_orders=orders)
        omegas = tuple(Poly.var(G.space_ctx, F, space[i], orders[i]) for i in range(p))
        return G, OrbitMap(omegas)
    if name == "dihedral_D8":
        _check_conductor(F, 8, name)
        space = list(space) if space is not None else ["u", "v"]
        mats = [
            [[1, 0], [0, -1]], [[0, 1], [1, 0]], [[-1, 0], [0, 1]], [[0, -1], [-1, 0]],
            [[0, -1], [1, 0]], [[-1, 0], [0, -1]], [[0, 1], [-1, 0]],
        ]
        G = close_group(mats, F, space, cap)
        a, b = space
        om = tuple(parse_poly(s, G.space_ctx, F) for s in (f"{a}^2+{b}^2", f"{a}^2*{b}^2"))
        return G, OrbitMap(om)
    if name == "tetrahedral_S4":
        _check_conductor(F, 8, name)
        space = list(space) if space is not None else ["u", "v", "w"]
        s2 = F.zeta(F.N // 8) - F.zeta(3 * F.N // 8)  # sqrt(2)
        h = F(1) / 2
        t12 = [[-1, 0, 0], [0, 1, 0], [0, 0, 1]]
        t23 = [[h, -h, -h * s2], [-h, h, -h * s2], [-h * s2, -h * s2, 0]]
        t34 = [[1, 0, 0], [0, -1, 0], [0, 0, 1]]
        G = close_group([t12, t23, t34], F, space, cap)
        u, v, w = space
        om = tuple(parse_poly(s, G.space_ctx, F) for s in (
            f"{u}^2+{v}^2+{w}^2", f"({u}+{v})*({u}-{v})*{w}", f"(2*{u}^2-{w}^2)*(2*{v}^2-{w}^2)"))
        return G, OrbitMap(om)
    raise GroupError(f"unknown builtin group {name!r}")


def extend_trivially(G: ReflGroup, omega: OrbitMap, new_space: Sequence[str]):
    """Let the group act trivially on extra coordinates; extend the orbit map by the identity."""
    new_space = list(new_space)
    m = len(new_space)
    if m == 0:
        return G, omega
    F = G.field
    p = G.dim
    zero, one = F.zero(), F.one()
    mats = []
    for e in G.elements:
        A = e.matrix
        mats.append(tuple(
            tuple(A[i][j] if i < p and j < p else (one if i == j else zero) for j in range(p + m))
            for i in range(p + m)
        ))
    space = list(G.space_ctx.names) + new_space
    H = ReflGroup(F, mats, space, G.generators, cyclic_orders=G.cyclic_orders, extra_dims=G.extra_dims + m)
    if G.cyclic_orders is not None:
        H._index = None
    ctx = H.space_ctx
    om = tuple(w.embed(ctx) for w in omega.omegas) + tuple(Poly.var(ctx, F, n) for n in new_space)
    return H, OrbitMap(om)
