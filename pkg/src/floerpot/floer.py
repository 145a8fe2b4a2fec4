"""Floer differentials on the exterior algebra, torsion exponents, bounds.

The differential is left exterior multiplication by ``alpha = sum g_i e_i``
where ``g`` is the log-gradient of the potential at the chosen point.  Its
cohomology over ``Lambda_0`` splits as ``Lambda_0^a + sum Lambda_0/T^{l_i}``;
the ``l_i`` are read off a Smith-normal-form style reduction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import MissingCertificate, PrecisionExhausted
from .novikov import INF, NovikovScalar, as_fraction, as_precision, fmt_precision, fmt_rational
from .polytope import (PiMultiple, flag_hamiltonian, flag_polytope, hofer_norm)


@dataclass(frozen=True)
class NovikovMatrix:
    rows: tuple[tuple[NovikovScalar, ...], ...]
    precision: object = None

    def __post_init__(self):
        rows = tuple(tuple(NovikovScalar.coerce(x) for x in r) for r in self.rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("matrix rows have different lengths")
        prec = self.precision
        if prec is None:
            prec = min((x.precision for r in rows for x in r), default=INF)
        prec = as_precision(prec)
        rows = tuple(tuple(x.truncate(prec) for x in r) for r in rows)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "precision", prec)

    @classmethod
    def zeros(cls, n: int, m: int, precision=INF) -> NovikovMatrix:
        return cls(tuple(tuple(NovikovScalar.zero(precision) for _ in range(m))
                         for _ in range(n)), precision)

    @classmethod
    def identity(cls, n: int, precision=INF) -> NovikovMatrix:
        return cls(tuple(tuple(NovikovScalar.one() if i == j else NovikovScalar.zero()
                               for j in range(n)) for i in range(n)), precision)

    @classmethod
    def diagonal(cls, entries: Sequence, precision=None) -> NovikovMatrix:
        n = len(entries)
        return cls(tuple(tuple(NovikovScalar.coerce(entries[i]) if i == j else NovikovScalar.zero()
                               for j in range(n)) for i in range(n)), precision)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: NovikovMatrix) -> NovikovMatrix:
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        prec = min(self.precision, other.precision)
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = NovikovScalar.zero(prec)
                for t in range(k):
                    a, b = self.rows[i][t], other.rows[t][j]
                    if not (a.is_zero() and b.is_zero()):
                        acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return NovikovMatrix(tuple(out), prec)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)


def exterior_basis(n: int) -> list[tuple[int, ...]]:
    """Subsets of ``range(n)`` ordered by degree, then lexicographically."""
    return [s for k in range(n + 1) for s in itertools.combinations(range(n), k)]


def wedge_differential(gradient: Sequence, n: int | None = None) -> NovikovMatrix:
    """Matrix of ``x -> alpha ^ x`` on the exterior algebra, ``alpha = sum g_i e_i``."""
    g = [NovikovScalar.coerce(x) for x in gradient]
    n = len(g) if n is None else n
    if len(g) != n:
        raise ValueError(f"gradient has {len(g)} entries, expected {n}")
    basis = exterior_basis(n)
    index = {s: k for k, s in enumerate(basis)}
    prec = min((x.precision for x in g), default=INF)
    N = len(basis)
    rows = [[NovikovScalar.zero(prec) for _ in range(N)] for _ in range(N)]
    for col, s in enumerate(basis):
        for i in range(n):
            if i in s or g[i].is_zero():
                continue
            target = tuple(sorted(s + (i,)))
            sign = -1 if sum(1 for j in s if j < i) % 2 else 1
            rows[index[target]][col] = g[i] if sign > 0 else -g[i]
    return NovikovMatrix(tuple(tuple(r) for r in rows), prec)


# -- Smith-normal-form reduction -------------------------------------------------------------

@dataclass(frozen=True)
class TorsionDecomposition:
    """``Lambda_0^betti + sum_i Lambda_0/T^{torsions_i}``, valid modulo ``T^precision``.

    Free summands are "free at this precision": over ``Lambda_0/T^P`` they
    look like ``Lambda_0/T^P``.
    """

    betti: int
    torsions: tuple[Fraction, ...]
    precision: object
    rank: int
    pivots: tuple[Fraction, ...] = ()
    mode: str = "cohomology"

    @property
    def min_torsion(self):
        """Least torsion exponent, counting free-at-precision summands as ``T^P``."""
        cands = list(self.torsions)
        if self.betti and self.precision != INF:
            cands.append(self.precision)
        return min(cands, default=INF)

    def describe(self) -> str:
        parts = []
        if self.betti:
            if self.precision == INF:
                parts.append(f"Λ0^{self.betti}")
            else:
                parts.append(f"(Λ0/T^({fmt_rational(self.precision)}))^{self.betti}")
        counts: dict = {}
        for t in self.torsions:
            counts[t] = counts.get(t, 0) + 1
        for t, k in sorted(counts.items()):
            s = f"Λ0/T^({fmt_rational(t)})"
            parts.append(s if k == 1 else f"({s})^{k}")
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {
            "betti": self.betti,
            "torsions": [fmt_rational(t) for t in self.torsions],
            "precision": fmt_precision(self.precision),
            "module": self.describe(),
            "mode": self.mode,
        }


def _pivot_valuations(M: NovikovMatrix) -> list[Fraction]:
    """Valuations of the diagonal after unimodular row/column elimination.

    Pivot: least valuation, ties broken row-major.  Elimination avoids
    dividing by the pivot: the target row is scaled by the pivot's unit
    part ``u = p / T^v`` and the pivot row by ``a / T^v``.
    """
    P = M.precision
    A = [list(r) for r in M.rows]
    nr, nc = M.shape
    pivots: list[Fraction] = []
    k = 0
    while k < min(nr, nc):
        best = None
        for i in range(k, nr):
            for j in range(k, nc):
                x = A[i][j]
                if not x.is_zero() and (best is None or x.valuation() < best[0]):
                    best = (x.valuation(), i, j)
        if best is None:
            break
        v, bi, bj = best
        for i in range(k, nr):
            for j in range(k, nc):
                x = A[i][j]
                if x.is_zero() and x.precision <= v:
                    raise PrecisionExhausted(
                        f"entry ({i},{j}) = {x} is unknown below T^({fmt_rational(v)}); "
                        "pivot choice depends on terms beyond the precision"
                    )
        A[k], A[bi] = A[bi], A[k]
        for r in A:
            r[k], r[bj] = r[bj], r[k]
        p = A[k][k]
        unit = p.shift(-v)
        for i in range(k + 1, nr):
            a = A[i][k]
            if a.is_zero():
                continue
            f = a.shift(-v)
            A[i] = [(unit * A[i][j] - f * A[k][j]).truncate(P) for j in range(nc)]
            A[i][k] = NovikovScalar.zero(P)
        for j in range(k + 1, nc):
            a = A[k][j]
            if a.is_zero():
                continue
            f = a.shift(-v)
            for i in range(nr):
                A[i][j] = (unit * A[i][j] - f * A[i][k]).truncate(P)
            A[k][j] = NovikovScalar.zero(P)
        pivots.append(v)
        k += 1
    return pivots


def _is_differential(M: NovikovMatrix) -> bool:
    n, m = M.shape
    return n == m and (M @ M).is_zero()


def torsion_decomposition(M: NovikovMatrix, as_differential: bool | None = None
                          ) -> TorsionDecomposition:
    """Module structure of ``ker M / im M`` (differential) or ``coker M``.

    With ``as_differential=None`` the mode is chosen by testing ``M^2 = 0``
    modulo the precision.  Entries of valuation ``>= precision`` count as
    zero, so their summands are reported as free.
    """
    if as_differential is None:
        as_differential = _is_differential(M)
    elif as_differential and not _is_differential(M):
        raise ValueError("matrix does not square to zero at this precision")
    pivots = _pivot_valuations(M)
    r = len(pivots)
    torsions = tuple(sorted(v for v in pivots if v > 0))
    nr, _ = M.shape
    if as_differential:
        return TorsionDecomposition(nr - 2 * r, torsions, M.precision, r, tuple(pivots),
                                    "cohomology")
    return TorsionDecomposition(nr - r, torsions, M.precision, r, tuple(pivots), "cokernel")


# -- displacement bounds ---------------------------------------------------------------------

@dataclass(frozen=True)
class DisplacementBound:
    bound_X: Fraction | None
    bound_mixed: Fraction | None
    provenance: dict = field(default_factory=dict)
    limit: bool = False

    def to_dict(self) -> dict:
        out = {}
        if self.bound_X is not None:
            out["hofer_X"] = fmt_rational(self.bound_X)
        if self.bound_mixed is not None:
            out["hofer_mixed"] = fmt_rational(self.bound_mixed)
        return out


def displacement_bounds(E1, E5, criticality=None, deformed=None) -> DisplacementBound:
    """Lower bounds for ``|G|_X`` and ``|G|_X + 2|G|_S``.

    ``criticality`` is a classification report (or a torsion decomposition)
    whose order must reach ``E5``; it yields ``bound_X = E5``.  ``deformed``
    is a lifted bulk-deformed critical point: residual valuation ``>= 2E``
    and every bulk weight of valuation ``>= E`` yield ``bound_mixed = 2E``.
    """
    E1, E5 = as_fraction(E1), as_fraction(E5)
    if E5 <= E1:
        raise ValueError(f"need E5 > E1, got E5 = {E5}, E1 = {E1}")
    E = E5 - E1
    bx = bm = None
    prov = {}
    if criticality is not None:
        order = getattr(criticality, "order", None)
        if order is None:
            order = criticality.min_torsion
        if order >= E5:
            bx = E5
            prov["hofer_X"] = (f"criticality order {fmt_precision(order)} >= E5; least torsion "
                               "exponent is at least E5")
    if deformed is not None:
        bulk = [x for v, x in deformed.as_dict().items() if v in deformed.bulk_variables]
        if deformed.residual_valuation >= 2 * E and all(w.valuation() >= E for w in bulk):
            bm = 2 * E
            prov["hofer_mixed"] = (f"bulk-deformed critical point mod T^({fmt_rational(2 * E)}) "
                                   f"with v(w) >= E = {fmt_rational(E)}")
    if bx is None and bm is None:
        raise MissingCertificate("neither the criticality nor the deformed-lift certificate holds")
    return DisplacementBound(bx, bm, prov)


@dataclass(frozen=True)
class LimitBound:
    bound_mixed: Fraction
    extrapolated: bool
    samples: tuple

    def to_dict(self) -> dict:
        return {"hofer_mixed_limit": fmt_rational(self.bound_mixed),
                "extrapolated": self.extrapolated, "samples": len(self.samples)}


def limit_lambda_bound(samples: Sequence) -> LimitBound:
    """Mixed bound as the family parameter goes to 0.

    ``samples`` are ``(lam, E1, E5)``.  When ``E5`` is affine in ``lam``
    across the samples the limit ``2 E5(0)`` is exact; otherwise the
    best sampled bound ``max 2(E5 - E1)`` is returned.
    """
    pts = sorted((as_fraction(l), as_fraction(a), as_fraction(b)) for l, a, b in samples)
    if not pts:
        raise ValueError("no samples")
    for lam, e1, e5 in pts:
        if lam <= 0 or e5 <= e1:
            raise ValueError(f"bad sample {(lam, e1, e5)}")
    if len(pts) >= 2:
        (l0, _, a0), (l1, _, a1) = pts[0], pts[1]
        slope = (a1 - a0) / (l1 - l0)
        if all(e5 == a0 + slope * (lam - l0) for lam, _, e5 in pts):
            return LimitBound(2 * (a0 - slope * l0), True, tuple(pts))
    return LimitBound(max(2 * (e5 - e1) for _, e1, e5 in pts), False, tuple(pts))


# -- flag manifold example -------------------------------------------------------------------

@dataclass(frozen=True)
class FlagReport:
    a: Fraction
    b: Fraction
    norm_X: PiMultiple
    norm_S: PiMultiple
    floor: PiMultiple
    argmax: tuple
    argmin: tuple

    @property
    def slack(self) -> PiMultiple:
        return self.norm_X - self.floor

    @property
    def ratio(self):
        return None if self.floor.coefficient == 0 else \
            self.norm_X.coefficient / self.floor.coefficient

    @property
    def holds(self) -> bool:
        return self.floor <= self.norm_X + self.norm_S.scale(2)

    def to_dict(self) -> dict:
        pt = lambda u: [fmt_rational(c) for c in u]  # noqa: E731
        return {
            "a": fmt_rational(self.a), "b": fmt_rational(self.b),
            "norm_X": str(self.norm_X), "norm_S": str(self.norm_S),
            "floor": str(self.floor), "slack": str(self.slack),
            "ratio": None if self.ratio is None else fmt_rational(self.ratio),
            "holds": self.holds,
            "argmax": [pt(u) for u in self.argmax], "argmin": [pt(u) for u in self.argmin],
        }


def flag_disk_energies(a, b) -> tuple[PiMultiple, PiMultiple]:
    """Energies of the two outside disk families for the tori near ``(b, b, b)``.

    In raw polytope units the facets ``x <= a`` and ``y >= -a-b`` sit at
    distances ``a - b`` and ``a + 2b`` from ``(b, b, b)``; the symplectic
    normalization multiplies by ``2 pi``.
    """
    a, b = as_fraction(a), as_fraction(b)
    return PiMultiple(2 * (a - b)), PiMultiple(2 * (a + 2 * b))


def flag_example_report(a, b) -> FlagReport:
    """Hofer norm of the circle action against the floor ``lim 2 E5 = 4 pi (a - b)``."""
    a, b = as_fraction(a), as_fraction(b)
    if not a > b >= 0:
        raise ValueError(f"need a > b >= 0, got a = {a}, b = {b}")
    P = flag_polytope(a, b)
    H = flag_hamiltonian()
    hn = hofer_norm(P, H, fiber=(b, b, b))
    e5 = min(flag_disk_energies(a, b))
    return FlagReport(a, b, hn.norm_X, hn.norm_fiber, e5.scale(2), hn.argmax, hn.argmin)
