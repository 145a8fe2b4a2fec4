"""Recursive-descent parser for the textual scalar and polynomial grammar.

Accepted input is any sum/product of rational constants, powers of the
formal variable ``T`` (rational exponents), powers of the declared
variables (integer exponents), parenthesized subexpressions and big-O
terms ``O(T^(p))``.  Canonical printed forms of :class:`NovikovScalar`
and :class:`LaurentPoly` are a subset of this grammar.

The parser returns a flat map ``(monomial, T-exponent) -> Fraction`` plus a
precision; callers assemble their own types from it.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .novikov import INF

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")

Flat = dict  # (tuple[int, ...], Fraction) -> Fraction


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, ident, sym = m.groups()
        if num is not None:
            out.append(("num", num))
        elif ident is not None:
            out.append(("id", ident))
        elif sym in "+-*/^()":
            out.append((sym, sym))
        else:
            raise ParseError(f"unexpected character {sym!r} in {text!r}")
        pos = m.end()
    out.append(("end", ""))
    return out


class _Expr:
    """Sparse element of Q[T^Q][vars^{+-1}] with a truncation precision."""

    __slots__ = ("terms", "precision")

    def __init__(self, terms: Flat, precision=INF):
        self.terms = {k: c for k, c in terms.items() if c != 0 and k[1] < precision}
        self.precision = precision

    def min_t(self):
        if not self.terms:
            return self.precision
        return min(k[1] for k in self.terms)

    def add(self, other: _Expr, sign: int = 1) -> _Expr:
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + sign * c
        return _Expr(out, min(self.precision, other.precision))

    def mul(self, other: _Expr) -> _Expr:
        prec = min(self.precision + other.min_t(), other.precision + self.min_t())
        out: Flat = {}
        for (ma, ta), ca in self.terms.items():
            for (mb, tb), cb in other.terms.items():
                k = (tuple(x + y for x, y in zip(ma, mb)), ta + tb)
                out[k] = out.get(k, 0) + ca * cb
        return _Expr(out, prec)

    def power(self, k: Fraction, n: int) -> _Expr:
        # Only single-term exact expressions may take non-natural powers.
        if len(self.terms) == 1 and self.precision == INF:
            ((m, t), c), = self.terms.items()
            if k.denominator != 1:
                if any(m) or c != 1:
                    raise ParseError("rational powers are only allowed on T")
                return _Expr({(m, t * k): Fraction(1)})
            k = int(k)
            return _Expr({(tuple(x * k for x in m), t * k): c ** k})
        if k.denominator != 1 or k < 0:
            raise ParseError("only natural powers of compound expressions are supported")
        result = _Expr({((0,) * n, Fraction(0)): Fraction(1)})
        for _ in range(int(k)):
            result = result.mul(self)
        return result


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = tuple(variables)
        self.index = {v: j for j, v in enumerate(self.vars)}
        self.n = len(self.vars)

    def peek(self, k: int = 0) -> tuple[str, str]:
        return self.toks[self.i + k]

    def take(self, kind: str | None = None) -> tuple[str, str]:
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r} but found {tok[1]!r} in {self.text!r}")
        self.i += 1
        return tok

    def const(self, c: Fraction) -> _Expr:
        return _Expr({((0,) * self.n, Fraction(0)): c})

    def parse(self) -> _Expr:
        if self.peek()[0] == "end":
            raise ParseError("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return e

    def expr(self) -> _Expr:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = self.const(Fraction(0)).add(acc, -1)
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            acc = acc.add(self.term(), sign)
        return acc

    def term(self) -> _Expr:
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc.mul(self.factor())
        return acc

    def rational(self) -> Fraction:
        sign = 1
        while self.peek()[0] in ("-", "+"):
            if self.take()[0] == "-":
                sign = -sign
        num = Fraction(int(self.take("num")[1]))
        if self.peek()[0] == "/":
            self.take()
            den = int(self.take("num")[1])
            if den == 0:
                raise ParseError("zero denominator")
            num /= den
        return sign * num

    def exponent(self) -> Fraction:
        if self.peek()[0] == "(":
            self.take()
            e = self.rational()
            self.take(")")
            return e
        return self.rational()

    def factor(self) -> _Expr:
        kind, val = self.peek()
        if kind == "num":
            base = self.const(self.rational())
        elif kind == "(":
            self.take()
            base = self.expr()
            self.take(")")
        elif kind == "id" and val == "O" and self.peek(1)[0] == "(":
            self.take()
            self.take("(")
            inner = self.expr()
            self.take(")")
            if len(inner.terms) != 1:
                raise ParseError("O(...) must contain a single power of T")
            ((m, t), _), = inner.terms.items()
            if any(m):
                raise ParseError("O(...) may only contain T")
            return _Expr({}, t)
        elif kind == "id":
            self.take()
            if val == "T":
                base = _Expr({((0,) * self.n, Fraction(1)): Fraction(1)})
            elif val in self.index:
                m = [0] * self.n
                m[self.index[val]] = 1
                base = _Expr({(tuple(m), Fraction(0)): Fraction(1)})
            else:
                raise ParseError(f"unknown symbol {val!r}; variables are {list(self.vars)}")
        else:
            raise ParseError(f"unexpected token {val!r} in {self.text!r}")
        if self.peek()[0] == "^":
            self.take()
            base = base.power(self.exponent(), self.n)
        return base


def parse_expression(text: str, variables=()) -> tuple[Flat, object]:
    """Parse ``text`` over ``variables``; return ``(flat terms, precision)``."""
    if not isinstance(text, str):
        raise ParseError(f"expected text, got {type(text).__name__}")
    e = _Parser(text, tuple(variables)).parse()
    return e.terms, e.precision


def discover_variables(text: str) -> tuple[str, ...]:
    """Identifiers other than ``T`` and ``O``, sorted."""
    names = {v for k, v in _tokenize(text) if k == "id" and v not in ("T", "O")}
    return tuple(sorted(names))
