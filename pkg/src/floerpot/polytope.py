"""Half-space moment polytopes and Hofer norms of linear Hamiltonians.

A polytope is ``{u : <nu_i, u> - c_i >= 0}`` with integer primitive normals
and rational offsets.  All arithmetic is exact; vertex enumeration solves
every ``dim``-subset of facet equations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import _linalg
from .errors import NoSolution, ParseError, Unbounded
from .novikov import as_fraction, fmt_rational

MAX_DIM = 4
MAX_FACETS = 32


@dataclass(frozen=True)
class Facet:
    normal: tuple[int, ...]
    offset: Fraction
    label: str
    cut: bool = False  # added by compactification (a divisor at infinity)

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(int(k) for k in self.normal))
        object.__setattr__(self, "offset", as_fraction(self.offset))
        if not any(self.normal):
            raise ValueError(f"facet {self.label!r} has a zero normal")
        if math.gcd(*self.normal) != 1:
            raise ValueError(f"facet {self.label!r} normal {self.normal} is not primitive")

    def distance(self, u: Sequence) -> Fraction:
        return sum((k * as_fraction(x) for k, x in zip(self.normal, u)), Fraction(0)) - self.offset


@dataclass(frozen=True)
class Polytope:
    dim: int
    facets: tuple[Facet, ...]
    basepoint: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "facets", tuple(self.facets))
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        for f in self.facets:
            if len(f.normal) != self.dim:
                raise ValueError(f"facet {f.label!r} normal has wrong length")
        labels = [f.label for f in self.facets]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate facet labels {labels}")
        if self.basepoint is not None:
            bp = tuple(as_fraction(x) for x in self.basepoint)
            if len(bp) != self.dim:
                raise ValueError("basepoint has wrong dimension")
            object.__setattr__(self, "basepoint", bp)

    def facet(self, label: str) -> Facet:
        for f in self.facets:
            if f.label == label:
                return f
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [f.label for f in self.facets]

    def contains(self, u) -> bool:
        return all(d >= 0 for d in facet_distances(self, u))

    def add_facet(self, facet: Facet) -> Polytope:
        return Polytope(self.dim, self.facets + (facet,), self.basepoint)

    def translate(self, t: Sequence) -> Polytope:
        """Image under ``u -> u + t``."""
        t = [as_fraction(x) for x in t]
        moved = tuple(
            Facet(f.normal, f.offset + sum(k * x for k, x in zip(f.normal, t)), f.label, f.cut)
            for f in self.facets
        )
        bp = None if self.basepoint is None else tuple(a + b for a, b in zip(self.basepoint, t))
        return Polytope(self.dim, moved, bp)

    # -- JSON -------------------------------------------------------------------
    def to_dict(self) -> dict:
        d = {
            "dim": self.dim,
            "facets": [
                {"normal": list(f.normal), "offset": fmt_rational(f.offset), "label": f.label,
                 **({"cut": True} if f.cut else {})}
                for f in self.facets
            ],
        }
        if self.basepoint is not None:
            d["basepoint"] = [fmt_rational(x) for x in self.basepoint]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Polytope:
        try:
            facets = tuple(
                Facet(tuple(f["normal"]), as_fraction(str(f["offset"])), str(f["label"]),
                      bool(f.get("cut", False)))
                for f in d["facets"]
            )
            bp = d.get("basepoint")
            bp = None if bp is None else tuple(as_fraction(str(x)) for x in bp)
            return cls(int(d["dim"]), facets, bp)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed polytope: {exc}") from exc

    @classmethod
    def load(cls, path) -> Polytope:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def facet_distances(P: Polytope, u: Sequence) -> list[Fraction]:
    """``l_i(u) = <nu_i, u> - c_i``; negative entries mean ``u`` lies outside."""
    if len(u) != P.dim:
        raise ValueError(f"point has {len(u)} coordinates, polytope dimension is {P.dim}")
    return [f.distance(u) for f in P.facets]


@dataclass(frozen=True)
class FiberLocus:
    """Points where the chosen facet distances all equal ``t``.

    ``u(t) = base + (t - t0) * direction + span(free_directions)``.  When
    ``direction`` is ``None`` the locus is the single value ``t = t0``.
    """

    base: tuple[Fraction, ...]
    t0: Fraction
    direction: tuple[Fraction, ...] | None
    free_directions: tuple[tuple[Fraction, ...], ...] = ()

    @property
    def is_point(self) -> bool:
        return self.direction is None and not self.free_directions

    def at(self, t) -> tuple[Fraction, ...]:
        t = as_fraction(t)
        if self.direction is None:
            if t != self.t0:
                raise ValueError(f"locus is fixed at t = {self.t0}")
            return self.base
        return tuple(b + (t - self.t0) * d for b, d in zip(self.base, self.direction))


def monotone_fiber_locus(P: Polytope, labels: Sequence[str]) -> FiberLocus:
    """Solve ``l_i(u) = t`` simultaneously for the facets named in ``labels``."""
    if len(labels) < 2:
        raise ValueError("need at least two facets to compare energies")
    facets = [P.facet(lab) for lab in labels]
    n = P.dim
    # unknowns (u_1..u_n, t):  <nu_i,u> - t = c_i
    A = [[Fraction(k) for k in f.normal] + [Fraction(-1)] for f in facets]
    b = [f.offset for f in facets]
    sol = _linalg.solve_affine(A, b)
    if sol is None:
        raise NoSolution(f"facets {list(labels)} admit no common distance")
    particular, null = sol
    t_dirs = [v for v in null if v[n] != 0]
    u_only = [v for v in null if v[n] == 0]
    if not t_dirs:
        return FiberLocus(tuple(particular[:n]), particular[n], None,
                          tuple(tuple(v[:n]) for v in u_only))
    d = t_dirs[0]
    d = [x / d[n] for x in d]
    # move the base to t = 0 and make the remaining null vectors t-free
    base = [p - particular[n] * x for p, x in zip(particular, d)]
    free = [tuple(x - v[n] * y for x, y in zip(v, d))[:n] for v in t_dirs[1:]]
    free += [tuple(v[:n]) for v in u_only]
    return FiberLocus(tuple(base[:n]), Fraction(0), tuple(d[:n]), tuple(free))


def recession_ray(P: Polytope) -> tuple[Fraction, ...] | None:
    """A nonzero ``r`` with ``<nu_i, r> >= 0`` for all facets, if one exists."""
    N = [[Fraction(k) for k in f.normal] for f in P.facets]
    n = P.dim
    null = _linalg.nullspace(N) if N else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    if null:
        return tuple(null[0])
    for rows in combinations(range(len(N)), n - 1):
        sub = [N[i] for i in rows]
        ker = _linalg.nullspace(sub) if sub else [[Fraction(1)]]
        if len(ker) != 1:
            continue
        r = ker[0]
        for cand in (r, [-x for x in r]):
            if all(sum(a * x for a, x in zip(row, cand)) >= 0 for row in N):
                return tuple(cand)
    return None


def is_bounded(P: Polytope) -> bool:
    return recession_ray(P) is None


def vertices(P: Polytope) -> list[tuple[Fraction, ...]]:
    """All vertices, by exhaustive solving of ``dim``-subsets of facets."""
    if P.dim > MAX_DIM or len(P.facets) > MAX_FACETS:
        raise ValueError(f"vertex enumeration limited to dim <= {MAX_DIM}, "
                         f"<= {MAX_FACETS} facets")
    ray = recession_ray(P)
    if ray is not None:
        raise Unbounded(f"polytope contains the ray {[fmt_rational(x) for x in ray]}")
    found = []
    seen = set()
    for rows in combinations(P.facets, P.dim):
        A = [[Fraction(k) for k in f.normal] for f in rows]
        try:
            u = tuple(_linalg.solve(A, [f.offset for f in rows]))
        except ZeroDivisionError:
            continue
        if u in seen:
            continue
        if P.contains(u):
            seen.add(u)
            found.append(u)
    return sorted(found)


@dataclass(frozen=True)
class PiMultiple:
    """Exact ``coefficient * pi`` (or a plain rational when ``pi`` is false)."""

    coefficient: Fraction
    pi: bool = True

    def __str__(self) -> str:
        c = self.coefficient
        if not self.pi:
            return fmt_rational(c)
        if c == 0:
            return "0"
        if c.denominator == 1:
            return "π" if c == 1 else ("-π" if c == -1 else f"{c.numerator}π")
        return f"({fmt_rational(c)})π"

    def __float__(self) -> float:
        return float(self.coefficient) * (math.pi if self.pi else 1.0)

    def _same(self, other: PiMultiple):
        if self.pi != other.pi and self.coefficient != 0 and other.coefficient != 0:
            raise ValueError("cannot mix pi and non-pi quantities exactly")

    def __sub__(self, other: PiMultiple) -> PiMultiple:
        self._same(other)
        return PiMultiple(self.coefficient - other.coefficient, self.pi or other.pi)

    def __add__(self, other: PiMultiple) -> PiMultiple:
        self._same(other)
        return PiMultiple(self.coefficient + other.coefficient, self.pi or other.pi)

    def __lt__(self, other: PiMultiple) -> bool:
        self._same(other)
        return self.coefficient < other.coefficient

    def __le__(self, other: PiMultiple) -> bool:
        self._same(other)
        return self.coefficient <= other.coefficient

    def scale(self, s) -> PiMultiple:
        return PiMultiple(self.coefficient * as_fraction(s), self.pi)


@dataclass(frozen=True)
class LinearHamiltonian:
    """``H(u) = scale * (<gradient, u> + constant)``, times pi when ``pi``."""

    gradient: tuple[Fraction, ...]
    scale: Fraction = Fraction(1)
    constant: Fraction = Fraction(0)
    pi: bool = True

    def __post_init__(self):
        object.__setattr__(self, "gradient", tuple(as_fraction(x) for x in self.gradient))
        object.__setattr__(self, "scale", as_fraction(self.scale))
        object.__setattr__(self, "constant", as_fraction(self.constant))

    @classmethod
    def from_projection(cls, weights: Sequence, projection: Sequence[Sequence], pi: bool = True):
        """``H(u) = <weights, pr(u)>`` for a linear projection matrix ``pr``."""
        w = [as_fraction(x) for x in weights]
        n = len(projection[0])
        grad = tuple(sum(w[r] * as_fraction(projection[r][c]) for r in range(len(w)))
                     for c in range(n))
        return cls(grad, pi=pi)

    def value(self, u) -> PiMultiple:
        s = sum((g * as_fraction(x) for g, x in zip(self.gradient, u)), Fraction(0))
        return PiMultiple(self.scale * (s + self.constant), self.pi)


@dataclass(frozen=True)
class HoferNorm:
    norm_X: PiMultiple
    norm_fiber: PiMultiple | None
    max_value: PiMultiple
    min_value: PiMultiple
    argmax: tuple = field(default=())
    argmin: tuple = field(default=())
    fiber_value: PiMultiple | None = None


def hofer_norm(P: Polytope, H: LinearHamiltonian, fiber=None) -> HoferNorm:
    """Hofer norm of a time-independent ``H`` that factors through the moment map.

    The norm on the whole space is ``max - min`` over the vertices.  Such an
    ``H`` is constant on every fiber, so its relative norm on a fiber is 0.
    """
    verts = vertices(P)
    if not verts:
        raise ValueError("polytope is empty")
    vals = [(H.value(v), v) for v in verts]
    hi = max(v.coefficient for v, _ in vals)
    lo = min(v.coefficient for v, _ in vals)
    argmax = tuple(u for v, u in vals if v.coefficient == hi)
    argmin = tuple(u for v, u in vals if v.coefficient == lo)
    mx, mn = PiMultiple(hi, H.pi), PiMultiple(lo, H.pi)
    norm_fiber = fiber_value = None
    if fiber is not None:
        fiber = tuple(as_fraction(x) for x in fiber)
        if not P.contains(fiber):
            raise ValueError("fiber point lies outside the polytope")
        norm_fiber = PiMultiple(Fraction(0), H.pi)
        fiber_value = H.value(fiber)
    return HoferNorm(mx - mn, norm_fiber, mx, mn, argmax, argmin, fiber_value)


# -- shipped polytopes ---------------------------------------------------------------

def cotangent_s3_polytope(basepoint=None) -> Polytope:
    """Gelfand-Tsetlin cone of ``T^*S^3``: x>=0, -y>=0, x-z>=0, z-y>=0."""
    facets = (
        Facet((1, 0, 0), 0, "K1"),
        Facet((0, -1, 0), 0, "K2"),
        Facet((1, 0, -1), 0, "K3"),
        Facet((0, -1, 1), 0, "K4"),
    )
    return Polytope(3, facets, basepoint)


def quadric_polytope(basepoint=None) -> Polytope:
    """``T^*S^3`` cone cut by the divisor at infinity ``y - x + 1 >= 0``."""
    P = cotangent_s3_polytope(basepoint)
    return P.add_facet(Facet((-1, 1, 0), -1, "D", cut=True))


def flag_polytope(a, b) -> Polytope:
    """Gelfand-Tsetlin polytope of the SU(3) orbit through diag(a, b, -a-b)."""
    a, b = as_fraction(a), as_fraction(b)
    if not a > b:
        raise ValueError("need a > b")
    facets = (
        Facet((-1, 0, 0), -a, "x<=a"),
        Facet((1, 0, 0), b, "x>=b"),
        Facet((0, -1, 0), -b, "y<=b"),
        Facet((0, 1, 0), -a - b, "y>=-a-b"),
        Facet((1, 0, -1), 0, "z<=x"),
        Facet((0, -1, 1), 0, "z>=y"),
    )
    return Polytope(3, facets, None)


# pr(x, y, z) = (z, x + y - z, -x - y); the Hamiltonian pairs it with (0, pi, -pi).
FLAG_PROJECTION = ((0, 0, 1), (1, 1, -1), (-1, -1, 0))
FLAG_WEIGHTS = (0, 1, -1)


def flag_hamiltonian() -> LinearHamiltonian:
    return LinearHamiltonian.from_projection(FLAG_WEIGHTS, FLAG_PROJECTION, pi=True)
