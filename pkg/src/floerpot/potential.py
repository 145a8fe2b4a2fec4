"""Disk potential functions of torus fibers built from polytope data.

Each facet contributes one Maslov-index-two disk: the monomial ``z^nu``
weighted by ``T^{l(u)}`` where ``l(u)`` is the facet distance at the base
point and the one-pointed invariant is 1.  Higher-energy contributions from
outside the local model are declared explicitly as ``outside_terms``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .errors import (BasepointExcluded, BasepointOnFacet, ParseError, PrecisionTooLow,
                     WeightTooSmall)
from .laurent import LaurentPoly, default_labels, gradient
from .novikov import INF, NovikovScalar, as_fraction, as_precision, fmt_precision, fmt_rational
from .polytope import Facet, Polytope, facet_distances

_IDENT_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSUVWXYZ_0123456789")


@dataclass(frozen=True)
class BulkWeight:
    """Weight ``w`` on the 4-chain over ``facet``: a Novikov scalar or a symbol."""

    facet: str
    weight: NovikovScalar | str

    @property
    def symbolic(self) -> bool:
        return isinstance(self.weight, str)


@dataclass(frozen=True)
class OutsideTerm:
    monomial: tuple[int, ...]
    energy: Fraction
    coefficient: NovikovScalar = field(default_factory=NovikovScalar.one)


@dataclass(frozen=True)
class PotentialSpec:
    polytope: Polytope
    bulk: tuple[BulkWeight, ...] = ()
    outside_terms: tuple[OutsideTerm, ...] = ()
    E5: Fraction | None = None
    E_cut_declared: Fraction | None = None
    require_gap: bool = False
    precision: Fraction | None = None
    variables: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.polytope.basepoint is None:
            raise ValueError("a potential needs a basepoint")
        object.__setattr__(self, "bulk", tuple(self.bulk))
        object.__setattr__(self, "outside_terms", tuple(self.outside_terms))
        if self.E5 is not None:
            object.__setattr__(self, "E5", as_fraction(self.E5))
            if self.E5 <= self.E1:
                raise ValueError(f"E5 = {self.E5} must exceed E1 = {self.E1}")
        if self.outside_terms and self.E5 is None:
            raise ValueError("outside terms need a declared E5")
        for t in self.outside_terms:
            if t.energy < self.E5:
                raise ValueError(f"outside term energy {t.energy} is below E5 = {self.E5}")
            if len(t.monomial) != self.polytope.dim:
                raise ValueError("outside term monomial has wrong length")
        local = set(f.label for f in self.local_facets)
        for b in self.bulk:
            if b.facet not in local:
                raise ValueError(f"bulk weight on {b.facet!r}: only local facets carry bulk")
            if not b.symbolic:
                self._check_weight(b.weight)
        e_cut = self.E_cut
        if self.outside_terms and e_cut is not None and not (self.E5 >= e_cut > self.E1):
            raise ValueError(f"energies violate E5 >= E_cut > E1 "
                             f"({self.E5}, {e_cut}, {self.E1})")
        if self.require_gap and not (self.E5 is not None and self.E5 > 3 * self.E1):
            raise ValueError(f"requested E5 > 3 E1 fails ({self.E5}, {self.E1})")

    def _check_weight(self, w: NovikovScalar):
        E = self.E
        if E is None:
            raise ValueError("bulk weights are gated by E = E5 - E1; declare E5")
        if w.valuation() < E:
            raise WeightTooSmall(f"v(w) = {fmt_precision(w.valuation())} < E = {fmt_rational(E)}")

    # -- derived energies --------------------------------------------------------------
    @property
    def basepoint(self) -> tuple[Fraction, ...]:
        return self.polytope.basepoint

    @property
    def local_facets(self) -> list[Facet]:
        return [f for f in self.polytope.facets if not f.cut]

    @property
    def energies(self) -> dict[str, Fraction]:
        return dict(zip(self.polytope.labels, facet_distances(self.polytope, self.basepoint)))

    @property
    def E1(self) -> Fraction:
        en = self.energies
        return min(en[f.label] for f in self.local_facets)

    @property
    def E_cut(self) -> Fraction | None:
        cuts = [self.energies[f.label] for f in self.polytope.facets if f.cut]
        if cuts:
            return min(cuts)
        return self.E_cut_declared

    @property
    def E(self) -> Fraction | None:
        return None if self.E5 is None else self.E5 - self.E1

    @property
    def default_precision(self):
        """``2E`` when ``E5`` is declared, else exact."""
        return INF if self.E5 is None else 2 * self.E

    @property
    def torus_variables(self) -> tuple[str, ...]:
        return self.variables or default_labels(self.polytope.dim)

    # -- JSON ---------------------------------------------------------------------------
    @classmethod
    def from_dict(cls, d: dict) -> PotentialSpec:
        try:
            P = Polytope.from_dict(d)
            bulk = []
            for b in d.get("bulk", []):
                text = str(b["weight"]).strip()
                if text and text[0].isalpha() and text != "T" and set(text) <= _IDENT_CHARS:
                    bulk.append(BulkWeight(str(b["facet"]), text))
                else:
                    bulk.append(BulkWeight(str(b["facet"]), NovikovScalar.parse(text)))
            outside = tuple(
                OutsideTerm(tuple(int(k) for k in t["monomial"]), as_fraction(str(t["energy"])),
                            NovikovScalar.parse(str(t.get("coefficient", "1"))))
                for t in d.get("outside_terms", [])
            )
            get = lambda k: None if d.get(k) is None else as_fraction(str(d[k]))  # noqa: E731
            variables = d.get("variables")
            return cls(P, tuple(bulk), outside, get("E5"), get("E_cut"),
                       bool(d.get("require_gap", False)), get("precision"),
                       None if variables is None else tuple(variables))
        except ParseError:
            raise
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed potential spec: {exc!r}") from exc
        except ValueError as exc:
            if isinstance(exc, WeightTooSmall):
                raise
            if "Invalid literal" in str(exc) or "invalid literal" in str(exc):
                raise ParseError(f"malformed number: {exc}") from exc
            raise

    def to_dict(self) -> dict:
        d = self.polytope.to_dict()
        if self.bulk:
            d["bulk"] = [{"facet": b.facet, "weight": b.weight if b.symbolic else str(b.weight)}
                         for b in self.bulk]
        if self.outside_terms:
            d["outside_terms"] = [
                {"monomial": list(t.monomial), "energy": fmt_rational(t.energy),
                 "coefficient": str(t.coefficient)}
                for t in self.outside_terms
            ]
        for key, val in (("E5", self.E5), ("E_cut", self.E_cut_declared),
                         ("precision", self.precision)):
            if val is not None:
                d[key] = fmt_rational(val)
        if self.require_gap:
            d["require_gap"] = True
        if self.variables is not None:
            d["variables"] = list(self.variables)
        return d

    @classmethod
    def load(cls, path) -> PotentialSpec:
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass(frozen=True)
class PotentialFunction:
    """A potential as a Laurent polynomial plus bookkeeping.

    ``poly`` is over ``bulk_variables + torus_variables``; only the torus
    variables are holonomies, the bulk variables are additive unknowns.
    """

    poly: LaurentPoly
    torus_variables: tuple[str, ...]
    bulk_variables: tuple[str, ...] = ()
    E1: Fraction | None = None
    E5: Fraction | None = None
    facet_terms: tuple = ()  # (label, monomial, energy) per facet

    @property
    def precision(self):
        return self.poly.precision

    @property
    def variables(self) -> tuple[str, ...]:
        return self.poly.variables

    def critical_system(self) -> list[LaurentPoly]:
        """Log-partials along the torus directions."""
        return [self.poly.partial(v) for v in self.torus_variables]

    def gradient(self, point):
        return gradient(self.poly, point, [self.poly.index(v) for v in self.torus_variables])

    def to_dict(self) -> dict:
        d = {
            "potential": str(self.poly),
            "variables": list(self.poly.variables),
            "torus_variables": list(self.torus_variables),
            "bulk_variables": list(self.bulk_variables),
            "precision": fmt_precision(self.precision),
            "terms": [{"facet": lab, "monomial": list(m), "energy": fmt_rational(e)}
                      for lab, m, e in self.facet_terms],
        }
        if self.E1 is not None:
            d["E1"] = fmt_rational(self.E1)
        if self.E5 is not None:
            d["E5"] = fmt_rational(self.E5)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> PotentialFunction:
        try:
            variables = tuple(d["variables"])
            poly = LaurentPoly.parse(d["potential"], variables)
            prec = as_precision(d.get("precision", "inf"))
            if prec != poly.precision:
                poly = poly.truncate(prec) if prec < poly.precision else poly
            get = lambda k: None if d.get(k) is None else as_fraction(str(d[k]))  # noqa: E731
            terms = tuple((t["facet"], tuple(t["monomial"]), as_fraction(str(t["energy"])))
                          for t in d.get("terms", []))
            return cls(poly, tuple(d["torus_variables"]), tuple(d.get("bulk_variables", [])),
                       get("E1"), get("E5"), terms)
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed potential: {exc!r}") from exc


def build_potential(spec: PotentialSpec, precision=None) -> PotentialFunction:
    """One monomial ``T^{l_i} z^{nu_i}`` per facet plus the declared outside terms."""
    default = spec.default_precision
    if spec.precision is not None:
        default = min(default, spec.precision)
    prec = default if precision is None else as_precision(precision)
    if prec > default:
        raise ValueError(f"precision can only be lowered (default {fmt_precision(default)})")
    if prec <= spec.E1:
        raise PrecisionTooLow(f"precision {fmt_precision(prec)} <= E1 = {fmt_rational(spec.E1)}")
    variables = spec.torus_variables
    terms: dict = {}
    facet_terms = []
    for f, ell in zip(spec.polytope.facets, facet_distances(spec.polytope, spec.basepoint)):
        if ell <= 0:
            raise BasepointOnFacet(
                f"basepoint has distance {fmt_rational(ell)} to facet {f.label!r}; "
                "the fiber is not a regular torus"
            )
        c = NovikovScalar.T(ell)
        terms[f.normal] = terms[f.normal] + c if f.normal in terms else c
        facet_terms.append((f.label, f.normal, ell))
    for t in spec.outside_terms:
        c = t.coefficient * NovikovScalar.T(t.energy)
        terms[t.monomial] = terms[t.monomial] + c if t.monomial in terms else c
    poly = LaurentPoly(variables, terms, prec)
    return PotentialFunction(poly, variables, (), spec.E1, spec.E5, tuple(facet_terms))


def apply_bulk(pf: PotentialFunction, spec: PotentialSpec) -> PotentialFunction:
    """First-order bulk deformation: each decorated facet term gets a factor ``1 + w``."""
    if not spec.bulk:
        return pf
    E = spec.E
    if E is None:
        raise ValueError("bulk deformation needs E5 (weights are gated by E = E5 - E1)")
    symbols = tuple(dict.fromkeys(b.weight for b in spec.bulk if b.symbolic))
    variables = symbols + tuple(v for v in pf.poly.variables if v not in symbols)
    poly = pf.poly.with_variables(variables)
    energies = spec.energies
    added = LaurentPoly(variables, {}, poly.precision)
    for b in spec.bulk:
        f = spec.polytope.facet(b.facet)
        base = LaurentPoly(variables, {tuple([0] * len(symbols)) + f.normal:
                                       NovikovScalar.T(energies[f.label])})
        if b.symbolic:
            added = added + base * LaurentPoly.variable(variables, b.weight)
        else:
            spec._check_weight(b.weight)
            added = added + base * LaurentPoly.constant(variables, b.weight)
    deformed = (poly + added).truncate(min(poly.precision, 2 * E))
    return replace(pf, poly=deformed, bulk_variables=symbols)


def compactify(spec: PotentialSpec, facet: Facet | tuple) -> PotentialSpec:
    """Add a divisor at infinity; its distance at the basepoint becomes ``E_cut``."""
    if not isinstance(facet, Facet):
        normal, offset, label = facet
        facet = Facet(tuple(normal), as_fraction(offset), label, cut=True)
    elif not facet.cut:
        facet = replace(facet, cut=True)
    ell = facet.distance(spec.basepoint)
    if ell <= 0:
        raise BasepointExcluded(
            f"new facet {facet.label!r} has distance {fmt_rational(ell)} at the basepoint"
        )
    return replace(spec, polytope=spec.polytope.add_facet(facet))


def quadric_spec() -> PotentialSpec:
    from .polytope import quadric_polytope

    return PotentialSpec(quadric_polytope((Fraction(1, 3), Fraction(-1, 3), Fraction(0))))


def cotangent_spec(lam=Fraction(1, 4), **kw) -> PotentialSpec:
    from .polytope import cotangent_s3_polytope

    lam = as_fraction(lam)
    return PotentialSpec(cotangent_s3_polytope((lam, -lam, Fraction(0))), **kw)


def monotone_basepoints(P: Polytope, labels: Sequence[str] | None = None):
    from .polytope import monotone_fiber_locus

    return monotone_fiber_locus(P, labels or [f.label for f in P.facets if not f.cut])
