"""Exact arithmetic in the cyclotomic field Q(zeta_N).

Elements are stored sparsely over a basis made of powers of zeta_N.  When N is
a prime power this is the usual power basis ``1, z, ..., z^(phi(N)-1)``; for
composite N the basis is the tensor product of the prime-power power bases,
which keeps every root of unity a single basis element.
"""

from __future__ import annotations

from itertools import product
from math import gcd, lcm
from typing import Iterable

from gmpy2 import mpq, mpz

from .parsing import ParseError, parse_expression

__all__ = [
    "CycloField",
    "CycloElem",
    "FieldMismatchError",
    "make_field",
    "cyclotomic_polynomial",
    "field_arith",
    "format_cyclo",
    "parse_cyclo",
]


class FieldMismatchError(ValueError):
    """Operands live in cyclotomic fields of different conductor."""


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # integer polynomials, coefficient lists low -> high, den monic
    num = list(num)
    dd = len(den) - 1
    q = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            q[i - dd] = c
            for j, dc in enumerate(den):
                num[i - dd + j] -= c * dc
    if any(num[:dd]):
        raise ArithmeticError("inexact division of integer polynomials")
    return q


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def cyclotomic_polynomial(n: int) -> list[int]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial.

    Computed by dividing ``x^n - 1`` by the product of Phi_d over the proper
    divisors d of n.
    """
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    memo: dict[int, list[int]] = {}

    def phi(m: int) -> list[int]:
        if m not in memo:
            num = [-1] + [0] * (m - 1) + [1]
            den = [1]
            for d in range(1, m):
                if m % d == 0:
                    den = _poly_mul(den, phi(d))
            memo[m] = _poly_divexact(num, den)
        return memo[m]

    return phi(n)


def _prime_powers(n: int) -> list[tuple[int, int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p**e, p, e))
        p += 1
    if n > 1:
        out.append((n, n, 1))
    return out


class CycloField:
    """The field Q(zeta_N).

    ``phi_N`` holds the integer coefficients of the N-th cyclotomic polynomial
    (low degree first) and ``degree`` is phi(N).  ``basis`` lists the exponents
    k such that zeta^k is a basis vector, in increasing order.
    """

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("conductor must be a positive integer")
        self.N = N
        self.phi_N = tuple(cyclotomic_polynomial(N))
        self.degree = len(self.phi_N) - 1
        # (q, p, e, N/q, (N/q)^-1 mod q, phi(q), p^(e-1)) per prime-power factor
        self._factors = []
        for q, p, e in _prime_powers(N):
            m = N // q
            self._factors.append((q, p, e, m, pow(m, -1, q) if q > 1 else 0, q - q // p, q // p))
        self.basis = tuple(sorted(self._basis_keys()))
        assert len(self.basis) == self.degree
        self._index = {k: i for i, k in enumerate(self.basis)}
        self._expansion: dict[int, tuple[tuple[int, int], ...]] = {}
        self._top: list | None = None
        self._zero = CycloElem(self, {})
        self._one = CycloElem(self, {0: mpq(1)})

    def _basis_keys(self) -> list[int]:
        ranges = [[b * f[3] for b in range(f[5])] for f in self._factors]
        return [sum(c) % self.N for c in product(*ranges)] if ranges else [0]

    def expand_power(self, k: int) -> tuple[tuple[int, int], ...]:
        """zeta^k in the basis, as ``((basis_exponent, sign), ...)``."""
        k %= self.N
        hit = self._expansion.get(k)
        if hit is not None:
            return hit
        choices = []
        for q, p, e, m, minv, phq, pe1 in self._factors:
            b = (k * minv) % q
            if b < phq:
                choices.append(((b * m, 1),))
            else:
                base = b - phq
                choices.append(tuple(((base + j * pe1) * m, -1) for j in range(p - 1)))
        if not choices:
            out = ((0, 1),)
        else:
            out = tuple(
                (sum(c[0] for c in combo) % self.N, _sign(combo))
                for combo in product(*choices)
            )
        self._expansion[k] = out
        return out

    def _reduce_vector(self, vec: list) -> None:
        """Rewrite an integer vector indexed by exponent mod N onto the basis, in place."""
        if self._top is None:
            self._top = []
            for q, p, e, m, minv, phq, pe1 in self._factors:
                tops = [k for k in range(self.N) if (k * minv) % q >= phq]
                shifts = [j * pe1 * m for j in range(1, p)]
                self._top.append((tops, shifts))
        N = self.N
        for tops, shifts in self._top:
            for k in tops:
                v = vec[k]
                if v:
                    vec[k] = 0
                    for s in shifts:
                        vec[k - s] -= v  # negative indices wrap modulo N

    # -- constructors ---------------------------------------------------
    def zero(self) -> "CycloElem":
        return self._zero

    def one(self) -> "CycloElem":
        return self._one

    def zeta(self, k: int = 1) -> "CycloElem":
        """zeta_N^k (negative k allowed)."""
        return self._from_raw({k % self.N: mpq(1)})

    def __call__(self, value) -> "CycloElem":
        if isinstance(value, CycloElem):
            if value.field is not self and value.field.N != self.N:
                raise FieldMismatchError(f"element of Q(zeta_{value.field.N}) used in Q(zeta_{self.N})")
            return value if value.field is self else CycloElem(self, dict(value._c))
        if isinstance(value, str):
            return parse_cyclo(value, self)
        q = mpq(value)
        return CycloElem(self, {0: q}) if q else self._zero

    def from_coeffs(self, coeffs: Iterable) -> "CycloElem":
        """Build an element from its coordinates in ``basis`` order."""
        coeffs = list(coeffs)
        if len(coeffs) != self.degree:
            raise ValueError(f"expected {self.degree} coefficients")
        return CycloElem(self, {k: mpq(c) for k, c in zip(self.basis, coeffs) if c})

    def _from_raw(self, raw: dict[int, object]) -> "CycloElem":
        # raw: exponent (any residue mod N) -> rational; reduce to the basis
        out: dict[int, object] = {}
        index = self._index
        for k, c in raw.items():
            if not c:
                continue
            if k in index:
                out[k] = out.get(k, 0) + c
            else:
                for kk, s in self.expand_power(k):
                    out[kk] = out.get(kk, 0) + (c if s > 0 else -c)
        return CycloElem(self, {k: c for k, c in out.items() if c})

    def galois(self, a: "CycloElem", j: int) -> "CycloElem":
        """Image of ``a`` under the automorphism zeta -> zeta^j (gcd(j, N) = 1)."""
        if gcd(j, self.N) != 1:
            raise ValueError("Galois exponent must be coprime to N")
        return self._from_raw({(k * j) % self.N: c for k, c in a._c.items()})

    def __eq__(self, other):
        return isinstance(other, CycloField) and other.N == self.N

    def __hash__(self):
        return hash(("CycloField", self.N))

    def __repr__(self):
        return f"CycloField({self.N})"


def _sign(combo) -> int:
    s = 1
    for _, t in combo:
        s *= t
    return s


def make_field(N: int) -> CycloField:
    return CycloField(N)


class CycloElem:
    """An immutable element of Q(zeta_N)."""

    __slots__ = ("field", "_c")

    def __init__(self, field: CycloField, data: dict):
        self.field = field
        self._c = data

    # -- inspection -------------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        return tuple(self._c.get(k, mpq(0)) for k in self.field.basis)

    def is_zero(self) -> bool:
        return not self._c

    def is_rational(self) -> bool:
        c = self._c
        return not c or (len(c) == 1 and 0 in c)

    def rational(self):
        """The rational value; raises if the element is irrational."""
        if not self._c:
            return mpq(0)
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._c[0]

    def terms(self) -> list[tuple[int, object]]:
        return sorted(self._c.items())

    def __bool__(self):
        return bool(self._c)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "CycloElem":
        if isinstance(other, CycloElem):
            if other.field is not self.field and other.field.N != self.field.N:
                raise FieldMismatchError(
                    f"cannot combine Q(zeta_{self.field.N}) with Q(zeta_{other.field.N})"
                )
            return other
        if isinstance(other, (int, type(mpq(0)))) or hasattr(other, "denominator"):
            q = mpq(other)
            return CycloElem(self.field, {0: q}) if q else self.field._zero
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._c:
            return self
        if not self._c:
            return other
        out = dict(self._c)
        for k, c in other._c.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return CycloElem(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.field, {k: -c for k, c in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._c, other._c
        if not a or not b:
            return self.field._zero
        if len(b) == 1 and 0 in b:
            s = b[0]
            if s == 1:
                return self
            return CycloElem(self.field, {k: c * s for k, c in a.items()})
        if len(a) == 1 and 0 in a:
            s = a[0]
            if s == 1:
                return other
            return CycloElem(self.field, {k: c * s for k, c in b.items()})
        if len(a) * len(b) > _DENSE_CUTOFF:
            return _kronecker_mul(self.field, a, b)
        N = self.field.N
        raw: dict[int, object] = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                if k >= N:
                    k -= N
                raw[k] = raw.get(k, 0) + c1 * c2
        return self.field._from_raw(raw)

    __rmul__ = __mul__

    def inverse(self) -> "CycloElem":
        """Multiplicative inverse, via relative norms down the prime-power tower."""
        c = self._c
        if not c:
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        F = self.field
        if len(c) == 1:
            (k, v), = c.items()
            return F._from_raw({(-k) % F.N: 1 / v})
        acc = F._one
        a = self
        N = F.N
        for q, p, e, m, minv, phq, pe1 in F._factors:
            if phq == 1 or all(k % q == 0 for k in a._c):
                continue
            # automorphisms moving only this factor: j = g mod q, j = 1 mod N/q
            conj = F._one
            for g in range(2, q):
                if g % p == 0:
                    continue
                j = _crt(g, q, 1, m) if m > 1 else g
                conj = conj * F.galois(a, j % N)
            acc = acc * conj
            a = a * conj
        if not a.is_rational():
            raise ArithmeticError("norm computation did not land in Q")
        return acc * (1 / a._c[0])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._c:
            raise ZeroDivisionError("division by zero in cyclotomic field")
        if other.is_rational():
            inv = 1 / other._c[0]
            return CycloElem(self.field, {k: v * inv for k, v in self._c.items()})
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field._one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycloElem):
            return other.field.N == self.field.N and other._c == self._c
        try:
            q = mpq(other)
        except (TypeError, ValueError):
            return NotImplemented
        if not q:
            return not self._c
        return len(self._c) == 1 and self._c.get(0) == q

    def __hash__(self):
        if self.is_rational():
            return hash(self._c.get(0, 0))
        return hash(frozenset(self._c.items()))

    def __str__(self):
        return format_cyclo(self)

    def __repr__(self):
        return f"CycloElem({format_cyclo(self)!r}, N={self.field.N})"


_DENSE_CUTOFF = 256


def _integer_coeffs(c: dict) -> tuple[dict, int]:
    den = 1
    for v in c.values():
        den = lcm(den, int(v.denominator))
    return {k: int(v.numerator) * (den // int(v.denominator)) for k, v in c.items()}, den


def _pack(ints: dict, nslots: int, width: int) -> mpz:
    pos = bytearray(nslots * width)
    neg = bytearray(nslots * width)
    for k, v in ints.items():
        if v > 0:
            pos[k * width:(k + 1) * width] = v.to_bytes(width, "little")
        else:
            neg[k * width:(k + 1) * width] = (-v).to_bytes(width, "little")
    return mpz(int.from_bytes(pos, "little")) - mpz(int.from_bytes(neg, "little"))


def _kronecker_mul(F: CycloField, a: dict, b: dict) -> CycloElem:
    # Clear denominators, multiply both integer polynomials as one big integer
    # product evaluated at 2^bits, then unpack the slots and reduce.
    N = F.N
    ia, da = _integer_coeffs(a)
    ib, db = _integer_coeffs(b)
    bits = (max(abs(v) for v in ia.values()).bit_length()
            + max(abs(v) for v in ib.values()).bit_length()
            + min(len(ia), len(ib)).bit_length() + 2)
    width = (bits + 7) // 8
    half = 1 << (8 * width - 1)
    nslots = 2 * N - 1
    prod = _pack(ia, N, width) * _pack(ib, N, width)
    offset = int.from_bytes(half.to_bytes(width, "little") * nslots, "little")
    raw = int(prod + offset).to_bytes(nslots * width + 1, "little")
    vec = [0] * N
    frombytes = int.from_bytes
    for k in range(nslots):
        v = frombytes(raw[k * width:(k + 1) * width], "little") - half
        if v:
            vec[k if k < N else k - N] += v
    F._reduce_vector(vec)
    den = da * db
    return CycloElem(F, {k: mpq(v, den) for k, v in enumerate(vec) if v})


def _crt(a: int, m: int, b: int, n: int) -> int:
    return (a + m * ((b - a) * pow(m, -1, n) % n)) % (m * n)


def _fmt_rational(q) -> str:
    q = mpq(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_cyclo(a: CycloElem, symbol: str = "z") -> str:
    """Canonical text: ``c0+c1*z^k1+...`` in increasing exponent, "0" for zero."""
    if not a._c:
        return "0"
    parts = []
    for k, c in sorted(a._c.items()):
        if k == 0:
            body = _fmt_rational(abs(c))
        else:
            zpart = symbol if k == 1 else f"{symbol}^{k}"
            body = zpart if abs(c) == 1 else f"{_fmt_rational(abs(c))}*{zpart}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += sign + body
    return out


def field_arith(a: CycloElem, b: CycloElem, op: str) -> CycloElem:
    if a.field.N != b.field.N:
        raise FieldMismatchError(f"conductors {a.field.N} and {b.field.N} differ")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def parse_cyclo(text: str, field: CycloField) -> CycloElem:
    """Parse a cyclotomic expression; the symbol ``z`` denotes zeta_N."""

    def resolve(name, pos):
        if name in ("z", "zeta"):
            return field.zeta(1)
        raise ParseError(f"unknown symbol {name!r}", pos)

    return parse_expression(text, resolve, field)
