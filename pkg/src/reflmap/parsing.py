"""Tokenizer and recursive-descent parser shared by the cyclotomic and polynomial grammars.

Grammar::

    expr     := ['-'|'+'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' natural)?
    base     := rational | identifier | '(' expr ')' | '-' factor
    rational := integer ('/' positive-integer)?

Identifiers are resolved through a callback, so the same parser serves both
grammars.  Implicit multiplication is rejected.
"""

from __future__ import annotations

import re
from typing import Callable

from gmpy2 import mpq

__all__ = ["ParseError", "parse_expression", "tokenize"]


class ParseError(ValueError):
    """Syntax error; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.reason = message


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Split ``text`` into ``(kind, value, pos)`` tokens; kind in int|ident|op|end."""
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            out.append(("op", ch, m.start(3)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, resolve, const):
        self.toks = tokenize(text)
        self.i = 0
        self.resolve = resolve
        self.const = const

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind != "op":
            raise ParseError(f"expected {value!r}", pos)

    def expr(self):
        kind, val, _ = self.peek()
        neg = False
        if kind == "op" and val in "+-":
            self.take()
            neg = val == "-"
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            elif kind in ("int", "ident") or (kind == "op" and val == "("):
                raise ParseError("implicit multiplication is not allowed; use '*'", pos)
            else:
                return acc

    def factor(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.factor()
        base = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise ParseError("exponent must be a natural number", pos)
            return base ** int(val)
        return base

    def base(self):
        kind, val, pos = self.take()
        if kind == "int":
            num = int(val)
            k2, v2, p2 = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, v3, p3 = self.take()
                if k3 != "int":
                    raise ParseError("denominator must be a positive integer", p3)
                if int(v3) == 0:
                    raise ParseError("zero denominator", p3)
                return self.const(mpq(num, int(v3)))
            return self.const(mpq(num))
        if kind == "ident":
            return self.resolve(val, pos)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {val!r}", pos)


def parse_expression(text: str, resolve: Callable, const: Callable):
    """Parse ``text``; ``resolve(name, pos)`` maps identifiers, ``const(q)`` embeds rationals."""
    if not isinstance(text, str):
        raise ParseError("expression must be a string", 0)
    p = _Parser(text, resolve, const)
    if p.peek()[0] == "end":
        raise ParseError("empty expression", 0)
    value = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        if kind in ("int", "ident") or val == "(":
            raise ParseError("implicit multiplication is not allowed; use '*'", pos)
        raise ParseError(f"unexpected {val!r}", pos)
    return value
