"""Sparse multivariate polynomials over Q(zeta_N)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .cyclotomic import CycloElem, CycloField, format_cyclo
from .orders import DEGREVLEX, MonOrder
from .parsing import ParseError, parse_expression

__all__ = [
    "VarContext",
    "Poly",
    "UnknownVariableError",
    "NotDivisibleError",
    "parse_poly",
    "exact_divide",
    "jacobian",
    "substitute",
    "minors",
    "determinant",
    "poly_gcd",
    "is_squarefree",
    "is_squarefree_bivariate",
]

ROLES = ("space", "target", "projective", "parameter", "source", "auxiliary")


class UnknownVariableError(ParseError):
    pass


class NotDivisibleError(ArithmeticError):
    """Raised by exact division; ``remainder`` holds the non-zero remainder."""

    def __init__(self, remainder: "Poly"):
        super().__init__(f"division leaves remainder {remainder}")
        self.remainder = remainder


@dataclass(frozen=True)
class VarContext:
    """Ordered variable names with a role tag for each."""

    names: tuple
    roles: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "roles", tuple(self.roles))
        if not self.names:
            raise ValueError("a variable context needs at least one variable")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        if len(self.roles) != len(self.names):
            raise ValueError("one role per variable is required")
        for r in self.roles:
            if r not in ROLES:
                raise ValueError(f"unknown variable role {r!r}")

    @classmethod
    def of(cls, names: Iterable[str], role: str = "space") -> "VarContext":
        names = tuple(names)
        return cls(names, (role,) * len(names))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def with_role(self, role: str) -> tuple:
        return tuple(n for n, r in zip(self.names, self.roles) if r == role)

    def extend(self, names: Iterable[str], role: str) -> "VarContext":
        names = tuple(names)
        return VarContext(self.names + names, self.roles + (role,) * len(names))

    def __contains__(self, name) -> bool:
        return name in self.names


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Immutable sparse polynomial: exponent tuple -> non-zero CycloElem."""

    __slots__ = ("ctx", "field", "terms")

    def __init__(self, ctx: VarContext, field: CycloField, terms: Mapping | None = None, *, _clean=False):
        self.ctx = ctx
        self.field = field
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            n = ctx.nvars
            clean = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise ValueError("exponent length does not match the variable context")
                if not isinstance(c, CycloElem):
                    c = field(c)
                if c:
                    clean[e] = c
            self.terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ctx, field) -> "Poly":
        return cls(ctx, field, {}, _clean=True)

    @classmethod
    def const(cls, ctx, field, c) -> "Poly":
        c = c if isinstance(c, CycloElem) else field(c)
        return cls(ctx, field, {(0,) * ctx.nvars: c} if c else {}, _clean=True)

    @classmethod
    def var(cls, ctx, field, name: str, power: int = 1) -> "Poly":
        i = ctx.index(name)
        e = [0] * ctx.nvars
        e[i] = power
        return cls(ctx, field, {tuple(e): field.one()}, _clean=True)

    def _new(self, terms) -> "Poly":
        return Poly(self.ctx, self.field, terms, _clean=True)

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ctx != self.ctx:
                raise ValueError("polynomials live in different variable contexts")
            return other
        return Poly.const(self.ctx, self.field, other)

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        t = self.terms
        return not t or (len(t) == 1 and not any(next(iter(t))))

    def constant_term(self) -> CycloElem:
        return self.terms.get((0,) * self.ctx.nvars, self.field.zero())

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def order(self) -> int:
        """Lowest total degree of a term (the multiplicity at the origin)."""
        return min((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.ctx.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "Poly":
        return self._new({e: c for e, c in self.terms.items() if sum(e) == d})

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def variables(self) -> tuple:
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return tuple(self.ctx.names[i] for i in sorted(used))

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.terms.values())

    def leading(self, order: MonOrder = DEGREVLEX):
        """(exponent, coefficient) of the leading term; raises on zero."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = order.keyfunc()
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def monic(self, order: MonOrder = DEGREVLEX) -> "Poly":
        if not self.terms:
            return self
        _, lc = self.leading(order)
        return self * lc.inverse()

    def sorted_terms(self, order: MonOrder = DEGREVLEX):
        key = order.keyfunc()
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, CycloElem):
                c = other
            else:
                try:
                    c = self.field(other)
                except (TypeError, ValueError):
                    return NotImplemented
            if not c:
                return self._new({})
            return self._new({e: v * c for e, v in self.terms.items()})
        other = self._lift(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if all(c.is_rational() for c in a.values()) and all(c.is_rational() for c in b.values()):
            return self._mul_rational(a, b)
        out: dict = {}
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return self._new({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def _mul_rational(self, a: dict, b: dict) -> "Poly":
        # plain mpq arithmetic, skipping the field element wrapper
        rb = [(e, c._c[0]) for e, c in b.items()]
        out: dict = {}
        for e1, c1 in a.items():
            q1 = c1._c[0]
            for e2, q2 in rb:
                e = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(e)
                out[e] = q1 * q2 if v is None else v + q1 * q2
        F = self.field
        return self._new({e: CycloElem(F, {0: q}) for e, q in out.items() if q})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of polynomials are not supported")
        result = Poly.const(self.ctx, self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return exact_divide(self, other)
        c = other if isinstance(other, CycloElem) else self.field(other)
        return self * c.inverse()

    def derivative(self, name: str) -> "Poly":
        i = self.ctx.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1 :]
                out[e2] = c * k
        return self._new(out)

    def embed(self, ctx: VarContext) -> "Poly":
        """The same polynomial read in a context containing all used variables."""
        if ctx == self.ctx:
            return self
        pos = []
        for i, name in enumerate(self.ctx.names):
            pos.append(ctx.index(name) if name in ctx.names else None)
        out = {}
        n = ctx.nvars
        for e, c in self.terms.items():
            new = [0] * n
            for i, k in enumerate(e):
                if k:
                    j = pos[i]
                    if j is None:
                        raise ValueError(f"variable {self.ctx.names[i]!r} missing from target context")
                    new[j] = k
            out[tuple(new)] = c
        return Poly(ctx, self.field, out, _clean=True)

    def evaluate(self, values: Mapping[str, object]) -> CycloElem:
        """Evaluate at field values for every used variable."""
        total = self.field.zero()
        vals = []
        for name in self.ctx.names:
            v = values.get(name)
            vals.append(None if v is None else (v if isinstance(v, CycloElem) else self.field(v)))
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    if vals[i] is None:
                        raise ValueError(f"no value for {self.ctx.names[i]!r}")
                    t = t * vals[i] ** k
            total = total + t
        return total

    # -- comparison / printing ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ctx.names == other.ctx.names and self.terms == other.terms
        if isinstance(other, (int, CycloElem)) or hasattr(other, "denominator"):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx.names, frozenset(self.terms.items())))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def _coef_symbol(ctx: VarContext) -> str:
    return "zeta" if "z" in ctx.names else "z"


def format_poly(p: Poly) -> str:
    """Canonical text: descending degrevlex, ``coeff*x^a*y^b`` terms."""
    if not p.terms:
        return "0"
    sym = _coef_symbol(p.ctx)
    names = p.ctx.names
    pieces = []
    for e, c in p.sorted_terms(DEGREVLEX):
        mono = "*".join(
            (names[i] if k == 1 else f"{names[i]}^{k}") for i, k in enumerate(e) if k
        )
        if c.is_rational():
            q = c.rational()
            neg = q < 0
            a = -q if neg else q
            txt = f"{a.numerator}" if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
            if mono:
                body = mono if a == 1 else f"{txt}*{mono}"
            else:
                body = txt
        else:
            neg = False
            ctext = f"({format_cyclo(c, sym)})"
            body = f"{ctext}*{mono}" if mono else ctext
        pieces.append(("-" if neg else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += sign + body
    return out


def parse_poly(text: str, ctx: VarContext, field: CycloField) -> Poly:
    """Parse a polynomial; declared variables win over the root-of-unity symbol."""

    def resolve(name, pos):
        if name in ctx.names:
            return Poly.var(ctx, field, name)
        if name in ("z", "zeta"):
            return Poly.const(ctx, field, field.zeta(1))
        raise UnknownVariableError(f"unknown variable {name!r}", pos)

    return parse_expression(text, resolve, lambda q: Poly.const(ctx, field, q))


def substitute(p: Poly, assignment: Mapping[str, Poly], ctx: VarContext | None = None) -> Poly:
    """Replace variables by polynomials; unassigned variables are kept.

    The result lives in ``ctx`` (default: the context of the replacement
    polynomials, or of ``p`` when nothing is replaced).
    """
    if ctx is None:
        ctxs = {q.ctx for q in assignment.values()}
        if len(ctxs) > 1:
            raise ValueError("replacement polynomials use different contexts")
        ctx = ctxs.pop() if ctxs else p.ctx
    for name in assignment:
        if name not in p.ctx.names:
            raise ValueError(f"cannot substitute unknown variable {name!r}")
    images = []
    for name in p.ctx.names:
        if name in assignment:
            q = assignment[name]
            if q.ctx != ctx:
                q = q.embed(ctx)
            images.append(q)
        else:
            if name not in ctx.names:
                # only an error if the variable is actually used
                images.append(None)
            else:
                images.append(Poly.var(ctx, p.field, name))
    cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            if images[i] is None:
                raise ValueError(f"variable {p.ctx.names[i]!r} has no image in the target context")
            cache[key] = images[i] if k == 1 else power(i, k - 1) * images[i]
        return cache[key]

    total: dict = {}
    one_exp = (0,) * ctx.nvars
    for e, c in p.terms.items():
        term = None
        for i, k in enumerate(e):
            if k:
                term = power(i, k) if term is None else term * power(i, k)
        if term is None:
            items = {one_exp: c}.items()
        else:
            items = ((e2, c2 * c) for e2, c2 in term.terms.items())
        for e2, c2 in items:
            v = total.get(e2)
            total[e2] = c2 if v is None else v + c2
    return Poly(ctx, p.field, {e: c for e, c in total.items() if c}, _clean=True)


def jacobian(f: Poly, names: Sequence[str]) -> list:
    return [f.derivative(n) for n in names]


def exact_divide(num: Poly, den: Poly) -> Poly:
    """Quotient ``q`` with ``num == q*den``; raises NotDivisibleError otherwise."""
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if den.is_constant():
        return num * den.constant_term().inverse()
    key = DEGREVLEX.keyfunc()
    le, lc = den.leading(DEGREVLEX)
    lc_inv = lc.inverse()
    rest = dict(num.terms)
    quot: dict = {}
    rem: dict = {}
    dterms = list(den.terms.items())
    while rest:
        e = max(rest, key=key)
        c = rest[e]
        if all(a >= b for a, b in zip(e, le)):
            shift = tuple(a - b for a, b in zip(e, le))
            q = c * lc_inv
            quot[shift] = q
            for de, dc in dterms:
                m = _add_exp(de, shift)
                v = rest.get(m)
                v = -(q * dc) if v is None else v - q * dc
                if v:
                    rest[m] = v
                else:
                    rest.pop(m, None)
        else:
            rem[e] = c
            del rest[e]
    if rem:
        raise NotDivisibleError(num._new(rem))
    q = num._new(quot)
    if q * den != num:
        raise AssertionError("exact division check failed")
    return q


def determinant(M: Sequence[Sequence[Poly]]) -> Poly:
    """Laplace expansion along the first row."""
    n = len(M)
    if n == 1:
        return M[0][0]
    total = None
    for j in range(n):
        if M[0][j].is_zero():
            continue
        sub = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * determinant(sub)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return M[0][0] * 0
    return total


def minors(M: Sequence[Sequence[Poly]], k: int) -> list:
    """All k x k minors; row subsets outer, column subsets inner, both lexicographic."""
    rows, cols = len(M), len(M[0]) if M else 0
    if k < 1 or k > min(rows, cols):
        raise ValueError("minor size out of range")
    out = []
    for R in combinations(range(rows), k):
        for C in combinations(range(cols), k):
            out.append(determinant([[M[i][j] for j in C] for i in R]))
    return out


# -- gcd and squarefreeness --------------------------------------------------


def _coeffs_in(p: Poly, i: int) -> dict:
    """View p as a polynomial in variable i: degree -> coefficient Poly."""
    parts: dict = {}
    for e, c in p.terms.items():
        k = e[i]
        parts.setdefault(k, {})[e[:i] + (0,) + e[i + 1 :]] = c
    return {k: p._new(t) for k, t in parts.items()}


def _normalize(p: Poly) -> Poly:
    return p.monic(DEGREVLEX) if p.terms else p


def _prem(a: Poly, b: Poly, i: int) -> Poly:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b in variable i."""
    db = max(e[i] for e in b.terms)
    lb = _coeffs_in(b, i)[db]
    r = a
    steps = max(e[i] for e in a.terms) - db + 1
    xvar = [0] * a.ctx.nvars
    while r.terms and steps > 0:
        dr = max(e[i] for e in r.terms)
        if dr < db:
            break
        lr = _coeffs_in(r, i)[dr]
        xvar[i] = dr - db
        shift = a._new({tuple(xvar): a.field.one()})
        r = lb * r - lr * shift * b
        steps -= 1
    return r * lb ** steps if steps > 0 else r


def _content(p: Poly, i: int) -> Poly:
    g = None
    # smallest coefficients first: a constant gcd usually shows up early
    for c in sorted(_coeffs_in(p, i).values(), key=lambda c: (c.total_degree(), len(c.terms))):
        g = c if g is None else poly_gcd(g, c)
        if g.is_constant():
            return Poly.const(p.ctx, p.field, 1)
    return _normalize(g)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic (degrevlex) gcd via recursive primitive remainder sequences."""
    if a.ctx != b.ctx:
        raise ValueError("gcd of polynomials in different contexts")
    if a.is_zero():
        return _normalize(b)
    if b.is_zero():
        return _normalize(a)
    if a.is_constant() or b.is_constant():
        return Poly.const(a.ctx, a.field, 1)
    used = set(a.variables()) | set(b.variables())
    # main variable of lowest degree keeps the remainder sequence short
    i = min((a.ctx.index(n) for n in used),
            key=lambda k: (max(max(e[k] for e in a.terms), max(e[k] for e in b.terms)), k))
    ca, cb = _content(a, i), _content(b, i)
    c = poly_gcd(ca, cb)
    pa, pb = exact_divide(a, ca), exact_divide(b, cb)
    da = max(e[i] for e in pa.terms)
    db = max(e[i] for e in pb.terms)
    if da == 0 or db == 0:
        return _normalize(c)
    if da < db:
        pa, pb = pb, pa
    # subresultant remainder sequence: the divisions below are exact
    one = Poly.const(a.ctx, a.field, 1)
    g = h = one
    while True:
        d = max(e[i] for e in pa.terms) - max(e[i] for e in pb.terms)
        r = _prem(pa, pb, i)
        if r.is_zero():
            g = pb
            break
        if max(e[i] for e in r.terms) == 0:
            g = None
            break
        pa, pb = pb, exact_divide(r, g * h ** d)
        g = _coeffs_in(pa, i)[max(e[i] for e in pa.terms)]
        if d == 1:
            h = g
        elif d > 1:
            h = exact_divide(g ** d, h ** (d - 1))
    if g is None:
        return _normalize(c)
    g = exact_divide(g, _content(g, i))
    return _normalize(c * g)


def is_squarefree(f: Poly) -> bool:
    """True when no non-constant factor divides f twice (characteristic zero)."""
    if f.is_zero():
        return False
    if f.is_constant():
        return True
    g = f
    for name in f.variables():
        g = poly_gcd(g, f.derivative(name))
        if g.is_constant():
            return True
    return g.is_constant()


def is_squarefree_bivariate(f: Poly) -> bool:
    if len(f.variables()) > 2:
        raise ValueError("expected a polynomial in at most two variables")
    return is_squarefree(f)
