"""Multivariate Laurent polynomials with Novikov coefficients.

Variables are multiplicative (local-system holonomies), so critical point
equations are written with logarithmic partials ``x_i d/dx_i``; see
:meth:`LaurentPoly.partial`.  Ordinary partials are kept as
:meth:`LaurentPoly.derivative` because Newton updates are additive.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from ._parse import discover_variables, parse_expression
from .errors import NotAUnit
from .novikov import INF, NovikovScalar, as_precision, fmt_precision

MAX_EXPONENT = 64

Monomial = tuple


def default_labels(n: int) -> tuple[str, ...]:
    if n <= 3:
        return ("x", "y", "z")[:n]
    return tuple(f"x{i + 1}" for i in range(n))


def _fmt_monomial(variables, mono) -> str:
    parts = []
    for v, k in zip(variables, mono):
        if k == 1:
            parts.append(v)
        elif k != 0:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


class LaurentPoly:
    """``sum_nu c_nu z^nu`` with ``nu`` in Z^n and Novikov coefficients.

    All coefficients are reduced to the shared ``precision`` of the
    polynomial; zero coefficients are never stored.
    """

    __slots__ = ("variables", "terms", "precision")

    def __init__(self, variables: Sequence[str], terms: Mapping | None = None, precision=INF):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable labels {self.variables}")
        n = len(self.variables)
        prec = as_precision(precision)
        coerced = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(k) for k in mono)
            if len(mono) != n:
                raise ValueError(f"exponent vector {mono} does not match {n} variables")
            if any(abs(k) > MAX_EXPONENT for k in mono):
                raise ValueError(f"exponent vector {mono} exceeds the bound {MAX_EXPONENT}")
            c = NovikovScalar.coerce(c)
            prec = min(prec, c.precision)
            coerced[mono] = coerced[mono] + c if mono in coerced else c
        self.terms = {}
        for mono, c in coerced.items():
            c = c.truncate(prec)
            if not c.is_zero():
                self.terms[mono] = c
        self.precision = prec

    @classmethod
    def _raw(cls, variables, terms, precision) -> LaurentPoly:
        obj = cls.__new__(cls)
        obj.variables = variables
        obj.terms = terms
        obj.precision = precision
        return obj

    # -- constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, variables, c, precision=INF) -> LaurentPoly:
        return cls(variables, {(0,) * len(variables): c}, precision)

    @classmethod
    def monomial(cls, variables, mono, c=1, precision=INF) -> LaurentPoly:
        return cls(variables, {tuple(mono): c}, precision)

    @classmethod
    def variable(cls, variables, name) -> LaurentPoly:
        mono = [0] * len(variables)
        mono[list(variables).index(name)] = 1
        return cls(variables, {tuple(mono): 1})

    @classmethod
    def parse(cls, text: str, variables: Sequence[str] | None = None) -> LaurentPoly:
        if variables is None:
            variables = discover_variables(text)
        flat, prec = parse_expression(text, variables)
        grouped: dict = {}
        for (mono, te), c in flat.items():
            grouped.setdefault(mono, []).append((te, c))
        return cls(variables, {m: NovikovScalar(ts, prec) for m, ts in grouped.items()}, prec)

    # -- queries ----------------------------------------------------------------
    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def index(self, var) -> int:
        if isinstance(var, int):
            if not 0 <= var < self.n_vars:
                raise IndexError(var)
            return var
        return self.variables.index(var)

    def is_zero(self) -> bool:
        return not self.terms

    def min_valuation(self):
        """Least coefficient valuation (``inf`` for the zero polynomial)."""
        return min((c.valuation() for c in self.terms.values()), default=INF)

    def coefficient(self, mono) -> NovikovScalar:
        return self.terms.get(tuple(mono), NovikovScalar.zero(self.precision))

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, reverse=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self.variables == other.variables and self.terms == other.terms
                and self.precision == other.precision)

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items()), self.precision))

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r}, variables={self.variables})"

    def __str__(self) -> str:
        pieces = []
        for mono in self.monomials():
            c = NovikovScalar._raw(self.terms[mono].terms, INF)
            m = _fmt_monomial(self.variables, mono)
            if len(c.terms) == 1:
                cs = str(c)
                sign = "-" if cs.startswith("-") else "+"
                body = cs.lstrip("-")
            else:
                sign, body = "+", f"({c})"
            pieces.append((sign, f"{body}*{m}" if m else body))
        if self.precision != INF:
            pieces.append(("+", f"O(T^({fmt_precision(self.precision)}))"))
        if not pieces:
            return "0"
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    # -- ring operations ----------------------------------------------------------
    def _check(self, other: LaurentPoly):
        if other.variables != self.variables:
            raise ValueError(f"variable mismatch {self.variables} vs {other.variables}")

    def _coerce(self, other) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return LaurentPoly.constant(self.variables, NovikovScalar.coerce(other))

    def __add__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        prec = min(self.precision, other.precision)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return LaurentPoly(self.variables, terms, prec)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._raw(self.variables, {m: -c for m, c in self.terms.items()}, self.precision)

    def __sub__(self, other) -> LaurentPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> LaurentPoly:
        return self._coerce(other) - self

    def _effective_valuation(self):
        return min(self.min_valuation(), self.precision)

    def __mul__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        prec = min(self.precision + other._effective_valuation(),
                   other.precision + self._effective_valuation())
        terms: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = tuple(a + b for a, b in zip(ma, mb))
                p = ca * cb
                terms[m] = terms[m] + p if m in terms else p
        return LaurentPoly(self.variables, terms, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentPoly:
        if not isinstance(k, int) or k < 0:
            raise ValueError("only natural powers of Laurent polynomials")
        result = LaurentPoly.constant(self.variables, 1)
        for _ in range(k):
            result = result * self
        return result

    def shift(self, exponent) -> LaurentPoly:
        """Multiply every coefficient by ``T^exponent``."""
        return LaurentPoly._raw(
            self.variables,
            {m: c.shift(exponent) for m, c in self.terms.items()},
            self.precision + Fraction(exponent),
        )

    def truncate(self, precision) -> LaurentPoly:
        return LaurentPoly(self.variables, self.terms, min(self.precision, as_precision(precision)))

    def times_monomial(self, mono, coeff=1) -> LaurentPoly:
        """Multiply by ``coeff * z^mono`` (a unit at every unit point)."""
        c = NovikovScalar.coerce(coeff)
        return LaurentPoly(
            self.variables,
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self.terms.items()},
            self.precision,
        )

    def with_variables(self, variables: Sequence[str]) -> LaurentPoly:
        """Re-embed into a (super)set of variables, reordering as needed."""
        variables = tuple(variables)
        missing = set(self.variables) - set(variables)
        if missing:
            raise ValueError(f"cannot drop variables {sorted(missing)}")
        pos = [self.variables.index(v) if v in self.variables else None for v in variables]
        terms = {
            tuple(m[p] if p is not None else 0 for p in pos): c for m, c in self.terms.items()
        }
        return LaurentPoly._raw(variables, terms, self.precision)

    # -- calculus ---------------------------------------------------------------------
    def partial(self, var) -> LaurentPoly:
        """Logarithmic partial ``x_i d/dx_i``: each term ``z^nu`` gets weight ``nu_i``."""
        i = self.index(var)
        terms = {m: c * m[i] for m, c in self.terms.items() if m[i] != 0}
        return LaurentPoly._raw(self.variables, terms, self.precision)

    def derivative(self, var) -> LaurentPoly:
        """Ordinary partial ``d/dx_i``."""
        i = self.index(var)
        terms = {}
        for m, c in self.terms.items():
            if m[i] != 0:
                mm = list(m)
                mm[i] -= 1
                terms[tuple(mm)] = c * m[i]
        return LaurentPoly._raw(self.variables, terms, self.precision)

    def log_gradient(self, variables=None) -> list[LaurentPoly]:
        idx = range(self.n_vars) if variables is None else variables
        return [self.partial(i) for i in idx]

    # -- evaluation --------------------------------------------------------------------
    def _point(self, point) -> list:
        if isinstance(point, Mapping):
            try:
                values = [point[v] for v in self.variables]
            except KeyError as exc:
                raise ValueError(f"point is missing variable {exc.args[0]!r}") from None
        else:
            values = list(point)
        if len(values) != self.n_vars:
            raise ValueError(f"point has {len(values)} coordinates, expected {self.n_vars}")
        return [NovikovScalar.coerce(v) for v in values]

    def eval(self, point) -> NovikovScalar:
        """Substitute ``point``; negative exponents need unit coordinates."""
        coords = self._point(point)
        return self._eval(coords)

    __call__ = eval

    def _eval(self, coords) -> NovikovScalar:
        cache: dict = {}
        inverses: dict = {}

        def power(i, k):
            key = (i, k)
            if key in cache:
                return cache[key]
            x = coords[i]
            if k < 0:
                if i not in inverses:
                    if not x.is_unit():
                        raise NotAUnit(
                            f"coordinate {self.variables[i]}={x} must be a unit of Lambda_0 "
                            "(valuation 0) to take negative powers"
                        )
                    target = self.precision if self.precision != INF else x.precision
                    inverses[i] = x.invert_unit(target)
                base, e = inverses[i], -k
            else:
                base, e = x, k
            r = NovikovScalar.one()
            for _ in range(e):
                r = r * base
            cache[key] = r
            return r

        total = NovikovScalar.zero(self.precision)
        for mono, c in self.terms.items():
            term = c
            for i, k in enumerate(mono):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total.truncate(self.precision)

    def substitute(self, assignments: Mapping[str, object]) -> LaurentPoly:
        """Fix some variables to Novikov values; returns a poly in the rest."""
        keep = [v for v in self.variables if v not in assignments]
        unknown = set(assignments) - set(self.variables)
        if unknown:
            raise ValueError(f"unknown variables {sorted(unknown)}")
        fixed = {self.index(v): NovikovScalar.coerce(c) for v, c in assignments.items()}
        keep_idx = [self.index(v) for v in keep]
        terms: dict = {}
        prec = self.precision
        for mono, c in self.terms.items():
            val = c
            for i, x in fixed.items():
                k = mono[i]
                if k:
                    if k < 0 and not x.is_unit():
                        raise NotAUnit(f"{self.variables[i]}={x} is not a unit")
                    target = prec if prec != INF else x.precision
                    base = x if k > 0 else x.invert_unit(target)
                    for _ in range(abs(k)):
                        val = val * base
            m = tuple(mono[i] for i in keep_idx)
            terms[m] = terms[m] + val if m in terms else val
        return LaurentPoly(tuple(keep), terms, prec)

    # -- reductions ----------------------------------------------------------------------
    def residue(self) -> LaurentPoly:
        """Reduction modulo ``Lambda_+`` (requires coefficients in ``Lambda_0``)."""
        terms = {}
        for m, c in self.terms.items():
            r = c.residue()
            if r != 0:
                terms[m] = NovikovScalar.constant(r)
        return LaurentPoly._raw(self.variables, terms, INF)

    def residue_coefficients(self) -> dict:
        """Residue polynomial as a plain ``{monomial: scalar}`` mapping."""
        return {m: c.coefficient(0) for m, c in self.terms.items() if c.coefficient(0) != 0}

    def to_numpy(self):
        """``(exponents, coefficients)`` arrays of the residue polynomial."""
        res = self.residue_coefficients()
        if not res:
            return np.zeros((0, self.n_vars), dtype=int), np.zeros(0, dtype=complex)
        monos = sorted(res)
        E = np.array(monos, dtype=int)
        c = np.array([complex(res[m]) for m in monos], dtype=complex)
        return E, c


def monomial_ratio(p: LaurentPoly, q: LaurentPoly):
    """Return ``(c, mono)`` with ``p = c * z^mono * q`` when such exist, else ``None``."""
    p._check(q)
    if p.is_zero() or q.is_zero() or len(p.terms) != len(q.terms):
        return None
    mp, mq = max(p.terms), max(q.terms)
    shift = tuple(a - b for a, b in zip(mp, mq))
    ratio = p.terms[mp] / q.terms[mq]
    if q.times_monomial(shift, ratio) == p:
        return ratio, shift
    return None


class Gradient(NamedTuple):
    entries: list
    order: object  # rational or inf: min valuation, capped by precision


def criticality_order(entries: Sequence[NovikovScalar]):
    """Largest ``E'`` with every entry vanishing modulo ``T^{E'}``."""
    return min((e.effective_valuation() for e in entries), default=INF)


def gradient(p: LaurentPoly, point, variables=None) -> Gradient:
    """Log-partials of ``p`` at ``point`` plus their common vanishing order."""
    coords = p._point(point)
    entries = [d._eval(coords) for d in p.log_gradient(variables)]
    return Gradient(entries, criticality_order(entries))


def jacobian(system: Sequence[LaurentPoly], point, active) -> list[list[NovikovScalar]]:
    """Matrix of ordinary partials ``d F_i / d x_j`` over ``active`` variables."""
    rows = []
    for f in system:
        coords = f._point(point)
        rows.append([f.derivative(j)._eval(coords) for j in active])
    return rows
