"""Monomial orders.

Each order maps an exponent tuple to a flat integer tuple; comparing keys with
the built-in tuple order compares monomials.  Flat keys make it cheap to build
min-heaps (negate every entry) for the reduction loops.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["MonOrder", "LEX", "DEGREVLEX", "LOCAL", "block_elim"]


@dataclass(frozen=True)
class MonOrder:
    kind: str  # lex | degrevlex | block_elim | local_negdegrevlex
    k: int = 0  # number of leading variables for block_elim

    def __post_init__(self):
        if self.kind not in ("lex", "degrevlex", "block_elim", "local_negdegrevlex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block_elim" and self.k < 0:
            raise ValueError("block size must be non-negative")

    @property
    def is_local(self) -> bool:
        return self.kind == "local_negdegrevlex"

    def key(self, exp: tuple) -> tuple:
        kind = self.kind
        if kind == "degrevlex":
            return (sum(exp),) + tuple(-e for e in reversed(exp))
        if kind == "lex":
            return exp
        if kind == "local_negdegrevlex":
            return (-sum(exp),) + tuple(-e for e in reversed(exp))
        a, b = exp[: self.k], exp[self.k :]
        return (sum(a),) + tuple(-e for e in reversed(a)) + (sum(b),) + tuple(-e for e in reversed(b))

    def keyfunc(self):
        """A specialised key function (avoids the dispatch in ``key``)."""
        kind = self.kind
        if kind == "degrevlex":
            return lambda e: (sum(e),) + tuple(-x for x in reversed(e))
        if kind == "lex":
            return lambda e: e
        if kind == "local_negdegrevlex":
            return lambda e: (-sum(e),) + tuple(-x for x in reversed(e))
        k = self.k

        def block(e):
            a, b = e[:k], e[k:]
            return (sum(a),) + tuple(-x for x in reversed(a)) + (sum(b),) + tuple(-x for x in reversed(b))

        return block

    def __str__(self):
        return f"block_elim({self.k})" if self.kind == "block_elim" else self.kind


LEX = MonOrder("lex")
DEGREVLEX = MonOrder("degrevlex")
LOCAL = MonOrder("local_negdegrevlex")


def block_elim(k: int) -> MonOrder:
    return MonOrder("block_elim", k)
