"""Truncated Novikov series.

A :class:`NovikovScalar` is a finite sum ``sum a_i T^{l_i}`` with exact
rational exponents, known modulo ``T^precision``.  Elements of the ring
``Lambda_0`` have all exponents >= 0, elements of the ideal ``Lambda_+``
have all exponents > 0, and elements of the field ``Lambda`` may carry
negative exponents.

Coefficients are exact :class:`fractions.Fraction` by default.  Complex
doubles are accepted for the numeric solver path; for those a coefficient
whose modulus is below :data:`NUMERIC_ZERO_TOL` is treated as zero.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Iterable, Union

from .errors import NotAUnit

INF = math.inf
NUMERIC_ZERO_TOL = 1e-12

Exponent = Fraction
Precision = Union[Fraction, float]  # float only ever means +inf
Coefficient = Union[Fraction, complex]


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and fraction strings like ``"-1/3"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def as_precision(p) -> Precision:
    if p is None:
        return INF
    if isinstance(p, float):
        if p == INF:
            return INF
        raise TypeError("finite precisions must be exact rationals")
    if isinstance(p, str) and p.strip() in ("inf", "+inf", "oo", "∞"):
        return INF
    return as_fraction(p)


def _coerce_coeff(c) -> Coefficient:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (float, complex)):
        return complex(c)
    if isinstance(c, numbers.Complex):
        return complex(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def is_zero_coeff(c: Coefficient) -> bool:
    if isinstance(c, Fraction):
        return c == 0
    return abs(c) <= NUMERIC_ZERO_TOL


def fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_precision(p: Precision) -> str:
    return "inf" if p == INF else fmt_rational(p)


def _fmt_coeff(c: Coefficient) -> str:
    if isinstance(c, Fraction):
        return fmt_rational(c)
    return repr(complex(c))


class NovikovScalar:
    """Immutable truncated series ``sum c_i T^{e_i} + O(T^precision)``.

    ``terms`` is a tuple of ``(exponent, coefficient)`` pairs with strictly
    increasing exponents, no zero coefficients and every exponent below
    ``precision``.  Constructed literals default to infinite precision.
    """

    __slots__ = ("terms", "precision", "_hash")

    def __init__(self, terms: Iterable = (), precision=INF):
        prec = as_precision(precision)
        acc: dict[Fraction, Coefficient] = {}
        if isinstance(terms, dict):
            terms = terms.items()
        for e, c in terms:
            e = as_fraction(e)
            if e >= prec:
                continue
            c = _coerce_coeff(c)
            acc[e] = acc[e] + c if e in acc else c
        self.terms = tuple(
            (e, acc[e]) for e in sorted(acc) if not is_zero_coeff(acc[e])
        )
        self.precision = prec
        self._hash = None

    @classmethod
    def _raw(cls, terms: tuple, precision: Precision) -> NovikovScalar:
        # Fast path: caller guarantees the invariants already hold.
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.precision = precision
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, precision=INF) -> NovikovScalar:
        return cls._raw((), as_precision(precision))

    @classmethod
    def one(cls, precision=INF) -> NovikovScalar:
        return cls.constant(1, precision)

    @classmethod
    def constant(cls, c, precision=INF) -> NovikovScalar:
        return cls([(Fraction(0), c)], precision)

    @classmethod
    def monomial(cls, c, exponent, precision=INF) -> NovikovScalar:
        return cls([(as_fraction(exponent), c)], precision)

    @classmethod
    def T(cls, exponent=1, precision=INF) -> NovikovScalar:
        return cls.monomial(1, exponent, precision)

    @classmethod
    def coerce(cls, x) -> NovikovScalar:
        if isinstance(x, NovikovScalar):
            return x
        if isinstance(x, str):
            return cls.parse(x)
        return cls.constant(x)

    @classmethod
    def parse(cls, text: str) -> NovikovScalar:
        from ._parse import parse_expression

        poly, prec = parse_expression(text, variables=())
        return cls([(te, c) for (_, te), c in poly.items()], prec)

    # -- basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Precision:
        """Least exponent with a nonzero coefficient; ``inf`` for zero."""
        return self.terms[0][0] if self.terms else INF

    def norm(self) -> float:
        v = self.valuation()
        return 0.0 if v == INF else math.exp(-float(v))

    def effective_valuation(self) -> Precision:
        """Known lower bound on the true valuation (``precision`` for zeros)."""
        return self.terms[0][0] if self.terms else self.precision

    def leading_coefficient(self) -> Coefficient:
        if not self.terms:
            raise ValueError("zero has no leading coefficient")
        return self.terms[0][1]

    def coefficient(self, exponent) -> Coefficient:
        e = as_fraction(exponent)
        for ee, c in self.terms:
            if ee == e:
                return c
        return Fraction(0)

    def residue(self) -> Coefficient:
        """Image in the residue field ``Lambda_0 / Lambda_+``."""
        if not self.in_lambda0():
            raise ValueError(f"{self} is not in Lambda_0")
        return self.coefficient(0)

    def in_lambda0(self) -> bool:
        return all(e >= 0 for e, _ in self.terms)

    def in_lambda_plus(self) -> bool:
        return all(e > 0 for e, _ in self.terms)

    def is_unit(self) -> bool:
        """Unit of ``Lambda_0``: nonzero with leading exponent exactly 0."""
        return bool(self.terms) and self.terms[0][0] == 0

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for _, c in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # -- truncation -------------------------------------------------------
    def truncate(self, precision) -> NovikovScalar:
        """Reduce modulo ``T^precision`` (never raises the precision)."""
        p = min(as_precision(precision), self.precision)
        if p == self.precision:
            return self
        return NovikovScalar._raw(tuple(t for t in self.terms if t[0] < p), p)

    def with_precision(self, precision) -> NovikovScalar:
        """Truncate to ``precision`` and declare it, even above the current one.

        Only meaningful for values known exactly beyond their stored
        precision, e.g. literals.
        """
        p = as_precision(precision)
        return NovikovScalar._raw(tuple(t for t in self.terms if t[0] < p), p)

    def shift(self, exponent) -> NovikovScalar:
        """Multiply by ``T^exponent`` (exponent may be negative)."""
        e = as_fraction(exponent)
        return NovikovScalar._raw(
            tuple((ee + e, c) for ee, c in self.terms), self.precision + e
        )

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> NovikovScalar:
        return NovikovScalar._raw(tuple((e, -c) for e, c in self.terms), self.precision)

    def __pos__(self) -> NovikovScalar:
        return self

    def __add__(self, other) -> NovikovScalar:
        other = _maybe_coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.precision, other.precision)
        a, b = self.terms, other.terms
        out = []
        i = j = 0
        while i < len(a) or j < len(b):
            if j >= len(b) or (i < len(a) and a[i][0] < b[j][0]):
                e, c = a[i]
                i += 1
            elif i >= len(a) or b[j][0] < a[i][0]:
                e, c = b[j]
                j += 1
            else:
                e, c = a[i][0], a[i][1] + b[j][1]
                i += 1
                j += 1
            if e >= prec:
                break
            if not is_zero_coeff(c):
                out.append((e, c))
        return NovikovScalar._raw(tuple(out), prec)

    __radd__ = __add__

    def __sub__(self, other) -> NovikovScalar:
        other = _maybe_coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> NovikovScalar:
        other = _maybe_coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> NovikovScalar:
        other = _maybe_coerce(other)
        if other is NotImplemented:
            return other
        prec = min(
            self.precision + other.effective_valuation(),
            other.precision + self.effective_valuation(),
        )
        acc: dict[Fraction, Coefficient] = {}
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                e = ea + eb
                if e >= prec:
                    break
                acc[e] = acc[e] + ca * cb if e in acc else ca * cb
        terms = tuple((e, acc[e]) for e in sorted(acc) if not is_zero_coeff(acc[e]))
        return NovikovScalar._raw(terms, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> NovikovScalar:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.precision == INF and not self.is_monomial():
                raise ValueError("negative power of an exact non-monomial needs a precision")
            return self.inverse() ** (-k)
        result = NovikovScalar.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def invert_unit(self, target_precision=None) -> NovikovScalar:
        """Inverse of a unit of ``Lambda_0`` modulo ``T^target_precision``.

        Uses the inverse of the leading coefficient and a truncated geometric
        series.  The result precision is ``min(target, self.precision)``.
        """
        if not self.is_unit():
            raise NotAUnit(
                f"{self} has valuation {fmt_precision(self.valuation())}; only "
                "valuation-0 elements are units of Lambda_0"
            )
        prec = min(as_precision(target_precision), self.precision)
        c0 = self.terms[0][1]
        inv_c0 = (Fraction(1) / c0) if isinstance(c0, Fraction) else 1 / c0
        if len(self.terms) == 1:
            return NovikovScalar([(Fraction(0), inv_c0)], prec)
        if prec == INF:
            raise ValueError("inverse of an exact non-monomial unit is an infinite series; "
                             "give a target precision")
        # self = c0 (1 - m) with m in Lambda_+
        m = NovikovScalar._raw(
            tuple((e, -c * inv_c0) for e, c in self.terms[1:]), self.precision
        ).truncate(prec)
        acc = NovikovScalar.one(prec)
        power = NovikovScalar.one(prec)
        while True:
            power = (power * m).truncate(prec)
            if power.is_zero():
                break
            acc = acc + power
        return (acc * inv_c0).truncate(prec)

    def inverse(self, target_precision=None) -> NovikovScalar:
        """Inverse in the field ``Lambda``.

        ``target_precision`` is the precision wanted for the result; by default
        the natural one, ``precision - 2 v``.
        """
        if self.is_zero():
            raise ZeroDivisionError("zero is not invertible")
        v = self.terms[0][0]
        unit = self.shift(-v)
        natural = self.precision - 2 * v
        target = min(natural, as_precision(target_precision))
        return unit.invert_unit(target + v).shift(-v)

    def __truediv__(self, other) -> NovikovScalar:
        other = _maybe_coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by a Novikov zero")
        v = other.valuation()
        want = self.precision - v
        if other.precision != INF:
            want = min(want, other.precision - 2 * v + self.effective_valuation())
        if want == INF and not other.is_monomial():
            raise ValueError("exact quotient by a non-monomial is an infinite series; "
                             "truncate first")
        inv_target = want - self.effective_valuation() if want != INF else INF
        if self.is_zero() and self.precision == INF:
            return NovikovScalar.zero()
        return (self * other.inverse(inv_target)).truncate(want)

    def __rtruediv__(self, other) -> NovikovScalar:
        other = _maybe_coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    # -- comparison / hashing ----------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, NovikovScalar):
            other = _maybe_coerce(other)
            if other is NotImplemented:
                return NotImplemented
        return self.terms == other.terms and self.precision == other.precision

    def congruent(self, other, precision) -> bool:
        """``self == other`` modulo ``T^precision``."""
        other = NovikovScalar.coerce(other)
        p = as_precision(precision)
        if p > min(self.precision, other.precision):
            return False
        return (self - other).truncate(p).is_zero()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.terms, self.precision))
        return self._hash

    def __repr__(self) -> str:
        return f"NovikovScalar({str(self)!r})"

    def __str__(self) -> str:
        parts = []
        for e, c in self.terms:
            body = f"{_fmt_coeff(c)}*T^({fmt_rational(e)})"
            if isinstance(c, Fraction) and c < 0:
                body = f"{_fmt_coeff(-c)}*T^({fmt_rational(e)})"
                parts.append(("-", body))
            else:
                parts.append(("+", body))
        if self.precision != INF:
            parts.append(("+", f"O(T^({fmt_rational(self.precision)}))"))
        if not parts:
            return "0"
        sign, first = parts[0]
        out = ("-" if sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _maybe_coerce(x):
    if isinstance(x, NovikovScalar):
        return x
    if isinstance(x, (int, Fraction, float, complex)) and not isinstance(x, bool):
        return NovikovScalar.constant(x)
    return NotImplemented


def T(exponent=1, precision=INF) -> NovikovScalar:
    return NovikovScalar.T(exponent, precision)
