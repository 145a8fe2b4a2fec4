"""Critical points of potential functions over the Novikov field.

The pipeline is: pick the equations (log-partials along the torus
directions), fix some variables, divide each equation by ``T^{v_i}`` and
reduce mod ``Lambda_+`` to get a residue-field system.  Solve that exactly
or numerically, then lift nondegenerate solutions by Newton steps graded by
the valuation of the residual.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import _linalg
from .errors import (DegenerateJacobian, InhomogeneousValuations, NonTerminating,
                     NoSolutionFound, PrecisionTooLow)
from .laurent import LaurentPoly, criticality_order
from .novikov import INF, NovikovScalar, as_precision, fmt_precision, fmt_rational
from .potential import PotentialFunction

NEWTON_TOL = 1e-10
DEDUP_TOL = 1e-6
DEFAULT_SEEDS = 200
NEWTON_MAX_STEPS = 60
STEP_TOL = 1e-9
COND_MAX = 1e8
# residual coefficients below this are rounding noise when lifting numeric solutions
NUMERIC_LIFT_TOL = 1e-9


@dataclass(frozen=True)
class CriticalProblem:
    """Equations ``F`` in ``variables``; ``fixed`` pins some of them.

    ``additive`` names variables that are not holonomies (bulk weights):
    they may vanish and get the candidate 0 in exact mode.
    """

    system: tuple[LaurentPoly, ...]
    variables: tuple[str, ...]
    fixed: Mapping[str, NovikovScalar] = field(default_factory=dict)
    precision: object = INF
    additive: tuple[str, ...] = ()
    potential: PotentialFunction | None = None

    def __post_init__(self):
        object.__setattr__(self, "system", tuple(self.system))
        fixed = {k: NovikovScalar.coerce(v) for k, v in dict(self.fixed).items()}
        object.__setattr__(self, "fixed", fixed)
        unknown = set(fixed) - set(self.variables)
        if unknown:
            raise ValueError(f"cannot fix unknown variables {sorted(unknown)}")
        for v, x in fixed.items():
            if v not in self.additive and not x.is_unit():
                raise ValueError(f"fixed holonomy {v}={x} must be a unit")
        if len(self.system) != len(self.active):
            raise ValueError(
                f"{len(self.system)} equations in {len(self.active)} unknowns "
                f"{list(self.active)}; fix variables or choose equations"
            )
        prec = as_precision(self.precision)
        sys_prec = min((f.precision for f in self.system), default=INF)
        if prec > sys_prec:
            raise ValueError(f"E_max {fmt_precision(prec)} exceeds the potential precision "
                             f"{fmt_precision(sys_prec)}")
        object.__setattr__(self, "precision", prec)

    @property
    def active(self) -> tuple[str, ...]:
        return tuple(v for v in self.variables if v not in self.fixed)

    @classmethod
    def from_potential(cls, pf: PotentialFunction, fix: Mapping | None = None, precision=None,
                       equations: Sequence[str] | None = None) -> CriticalProblem:
        """Log-partials of ``pf`` along ``equations`` (default: every torus variable)."""
        eqs = tuple(equations) if equations is not None else pf.torus_variables
        system = [pf.poly.partial(v) for v in eqs]
        prec = pf.precision if precision is None else as_precision(precision)
        return cls(tuple(system), pf.variables, dict(fix or {}), prec, pf.bulk_variables, pf)

    def reduced_system(self) -> list[LaurentPoly]:
        """Equations with the fixed variables substituted, over ``active``."""
        active = self.active
        out = []
        for f in self.system:
            g = f.substitute(self.fixed) if self.fixed else f
            out.append(g.with_variables(active).truncate(self.precision))
        return out


@dataclass(frozen=True)
class LeadingSystem:
    variables: tuple[str, ...]
    equations: tuple[LaurentPoly, ...]  # residue-field polynomials
    normalized: tuple[LaurentPoly, ...]  # F_i / T^{v_i}
    valuations: tuple[Fraction, ...]
    clearing: tuple[tuple[int, ...], ...]  # monomial clearing negative exponents per equation
    additive: tuple[str, ...] = ()

    @property
    def precisions(self) -> tuple:
        return tuple(f.precision for f in self.normalized)


def leading_system(problem: CriticalProblem, rescale: bool = True) -> LeadingSystem:
    """Split each equation as ``T^{v_i}(F0_i + higher)`` and keep the residues ``F0_i``."""
    reduced = problem.reduced_system()
    vals = []
    for i, f in enumerate(reduced):
        if f.is_zero():
            raise ValueError(f"equation {i} vanishes identically at this precision")
        vals.append(f.min_valuation())
    if not rescale and len(set(vals)) > 1:
        raise InhomogeneousValuations(
            "equations have different leading valuations "
            + ", ".join(fmt_rational(v) for v in vals)
        )
    normalized = tuple(f.shift(-v) for f, v in zip(reduced, vals))
    residues = tuple(f.residue() for f in normalized)
    clearing = []
    for r in residues:
        n = r.n_vars
        lows = [min((m[j] for m in r.terms), default=0) for j in range(n)]
        clearing.append(tuple(-k if k < 0 else 0 for k in lows))
    additive = tuple(v for v in problem.additive if v in problem.active)
    return LeadingSystem(problem.active, residues, normalized, tuple(vals), tuple(clearing),
                         additive)


# -- residue-field solving ------------------------------------------------------------------

@dataclass(frozen=True)
class LeadingSolution:
    variables: tuple[str, ...]
    values: tuple  # Fraction (exact) or complex (numeric)
    jacobian: tuple[tuple, ...]
    det: object
    rank: int
    mode: str = "exact"

    @property
    def corank(self) -> int:
        return len(self.variables) - self.rank

    @property
    def nondegenerate(self) -> bool:
        return self.corank == 0

    @property
    def certificate(self) -> str:
        return "nondegenerate" if self.nondegenerate else "degenerate"

    def as_dict(self) -> dict:
        return dict(zip(self.variables, self.values))


def _residue_terms(p: LaurentPoly):
    return [(m, c.coefficient(0)) for m, c in p.terms.items()]


def _eval_exact(terms, point) -> Fraction | None:
    total = Fraction(0)
    for m, c in terms:
        val = c
        for x, k in zip(point, m):
            if k < 0 and x == 0:
                return None
            if k:
                val = val * x ** k
        total += val
    return total


def _jacobian_exact(eqs: Sequence[LaurentPoly], point) -> list[list]:
    rows = []
    for f in eqs:
        row = []
        for j in range(f.n_vars):
            d = _residue_terms(f.derivative(j))
            row.append(_eval_exact(d, point))
        rows.append(row)
    return rows


def _tag(ls: LeadingSystem, point, mode: str) -> LeadingSolution:
    if mode == "exact":
        J = _jacobian_exact(ls.equations, point)
        tol = _linalg.NUMERIC_TOL
    else:
        J = _numeric_jacobian(_numeric_system(ls), np.array(point, dtype=complex)).tolist()
        tol = 1e-8
    det = _linalg.det(J, tol) if J else Fraction(1)
    rnk = _linalg.rank(J, tol) if J else 0
    if mode == "numeric" and abs(det) < tol:
        det = 0j
    return LeadingSolution(ls.variables, tuple(point), tuple(tuple(r) for r in J), det, rnk, mode)


def _exact_candidates(ls: LeadingSystem, extra: Mapping | None):
    per_var = []
    for v in ls.variables:
        base = [Fraction(0), Fraction(1), Fraction(-1)] if v in ls.additive else \
               [Fraction(1), Fraction(-1)]
        for c in (extra or {}).get(v, ()):
            c = Fraction(c) if not isinstance(c, Fraction) else c
            if c not in base:
                base.append(c)
        per_var.append(base)
    return itertools.product(*per_var)


def _numeric_system(ls: LeadingSystem):
    out = []
    for f in ls.equations:
        E, c = f.to_numpy()
        out.append((E, c))
    return out


def _numeric_eval(system, x: np.ndarray) -> np.ndarray:
    vals = np.empty(len(system), dtype=complex)
    for i, (E, c) in enumerate(system):
        vals[i] = np.sum(c * np.prod(x[None, :] ** E, axis=1)) if len(c) else 0
    return vals


def _numeric_jacobian(system, x: np.ndarray) -> np.ndarray:
    n = len(x)
    J = np.zeros((len(system), n), dtype=complex)
    for i, (E, c) in enumerate(system):
        if not len(c):
            continue
        for j in range(n):
            Ej = E.copy()
            Ej[:, j] -= 1
            mask = E[:, j] != 0
            if mask.any():
                J[i, j] = np.sum(c[mask] * E[mask, j] * np.prod(x[None, :] ** Ej[mask], axis=1))
    return J


def _newton(system, x0: np.ndarray, log_mask: np.ndarray, tol: float):
    """Newton iteration; torus coordinates move in log space so they stay in C*."""
    x = x0.astype(complex)
    with np.errstate(all="ignore"):
        for _ in range(NEWTON_MAX_STEPS):
            F = _numeric_eval(system, x)
            if not np.all(np.isfinite(F)):
                return None
            if np.max(np.abs(F), initial=0.0) < tol:
                # Accept only a genuine fixed point: near the toric boundary the
                # residual can be tiny while Newton keeps drifting off to infinity.
                for _ in range(2):
                    J = _numeric_jacobian(system, x)
                    try:
                        x_new = _step(x, J, _numeric_eval(system, x), log_mask)
                    except np.linalg.LinAlgError:
                        return None
                    move = np.where(log_mask, np.abs(np.log(x_new / x)), np.abs(x_new - x))
                    x = x_new
                F = _numeric_eval(system, x)
                if (np.all(np.isfinite(F)) and np.max(np.abs(F), initial=0.0) < tol
                        and np.max(move, initial=0.0) < STEP_TOL
                        and _log_condition(system, x, log_mask) < COND_MAX):
                    return x
                return None
            J = _numeric_jacobian(system, x)
            try:
                x = _step(x, J, F, log_mask)
            except np.linalg.LinAlgError:
                return None
            if not np.all(np.isfinite(x)):
                return None
    return None


def _log_condition(system, x, log_mask) -> float:
    """Condition number of the row-normalized Jacobian in log coordinates.

    Approximate zeros that sit near a root of a face system (a root at
    infinity) have a free direction there, so this blows up.
    """
    J = _numeric_jacobian(system, x) * np.where(log_mask, x, 1.0)[None, :]
    scale = np.array([np.sum(np.abs(c * np.prod(x[None, :] ** E, axis=1))) if len(c) else 1.0
                      for E, c in system])
    return float(np.linalg.cond(J / np.maximum(scale, 1e-300)[:, None]))


def _step(x, J, F, log_mask):
    # chain rule: d/ds_j = x_j d/dx_j on log coordinates
    scale = np.where(log_mask, x, 1.0)
    delta = np.linalg.solve(J * scale[None, :], -F)
    if not np.all(np.isfinite(delta)):
        raise np.linalg.LinAlgError("non-finite step")
    return np.where(log_mask, x * np.exp(np.clip(delta.real, -30, 30) + 1j * delta.imag),
                    x + delta)


def _random_seeds(rng: np.random.Generator, n_seeds: int, log_mask: np.ndarray) -> list:
    n = len(log_mask)
    radius = np.exp(rng.uniform(-1.0, 1.0, size=(n_seeds, n)))
    angle = rng.uniform(-np.pi, np.pi, size=(n_seeds, n))
    torus = radius * np.exp(1j * angle)
    additive = rng.normal(size=(n_seeds, n)) + 1j * rng.normal(size=(n_seeds, n))
    return list(np.where(log_mask[None, :], torus, additive))


def solve_leading(ls: LeadingSystem, mode: str = "exact", seeds=None, candidates=None,
                  n_seeds: int = DEFAULT_SEEDS, rng_seed: int = 0, tol: float = NEWTON_TOL,
                  dedup: float = DEDUP_TOL) -> list[LeadingSolution]:
    """Solutions of the residue system, each tagged with its Jacobian determinant.

    Exact mode tries ``{+-1}`` per holonomy (``{0, +-1}`` per additive
    variable) plus ``candidates``; numeric mode runs Newton from ``seeds``
    followed by ``n_seeds`` random starts.  An empty result raises
    :class:`NoSolutionFound`, which is not a proof that none exist.
    """
    if mode not in ("exact", "numeric"):
        raise ValueError(f"unknown mode {mode!r}")
    found: list[LeadingSolution] = []
    if mode == "exact":
        systems = [_residue_terms(f) for f in ls.equations]
        for point in _exact_candidates(ls, candidates):
            vals = [_eval_exact(t, point) for t in systems]
            if all(v == 0 for v in vals):
                found.append(_tag(ls, point, "exact"))
    else:
        system = _numeric_system(ls)
        log_mask = np.array([v not in ls.additive for v in ls.variables], dtype=bool)
        starts = [np.asarray(s, dtype=complex) for s in (seeds or [])]
        starts += _random_seeds(np.random.default_rng(rng_seed), n_seeds, log_mask)
        roots: list[np.ndarray] = []
        for x0 in starts:
            if x0.shape != (len(ls.variables),):
                raise ValueError(f"seed {x0} has the wrong length")
            x = _newton(system, x0, log_mask, tol)
            if x is None or any(np.max(np.abs(x - r)) < dedup for r in roots):
                continue
            roots.append(x)
        roots.sort(key=lambda r: tuple(np.round(np.concatenate([r.real, r.imag]), 8)))
        found = [_tag(ls, tuple(complex(v) for v in r), "numeric") for r in roots]
    if not found:
        raise NoSolutionFound(
            f"no residue solution found in {mode} mode (this does not prove none exist)"
        )
    return found


# -- lifting ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    variables: tuple[str, ...]
    assignment: tuple[NovikovScalar, ...]
    residual_valuation: object
    leading_jacobian_det: object
    certificate: str
    leading: tuple
    schedule: tuple = ()
    epsilon: object = INF
    precision: object = INF
    fixed: Mapping[str, NovikovScalar] = field(default_factory=dict)
    bulk_variables: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, NovikovScalar]:
        return dict(zip(self.variables, self.assignment))

    def point(self) -> dict[str, NovikovScalar]:
        """Full assignment including the fixed variables."""
        out = dict(self.fixed)
        out.update(self.as_dict())
        return out

    def to_dict(self) -> dict:
        return {
            "assignment": {v: str(x) for v, x in zip(self.variables, self.assignment)},
            "fixed": {v: str(x) for v, x in sorted(self.fixed.items())},
            "residual_valuation": fmt_precision(self.residual_valuation),
            "leading_jacobian_det": _fmt_value(self.leading_jacobian_det),
            "certificate": self.certificate,
            "schedule": [fmt_rational(s) for s in self.schedule],
            "epsilon": fmt_precision(self.epsilon),
            "precision": fmt_precision(self.precision),
        }


def _fmt_value(x) -> str:
    if isinstance(x, complex):
        re_, im = round(x.real, 10) + 0.0, round(x.imag, 10) + 0.0
        return f"{re_:.10g}" if im == 0 else f"{re_:.10g}{im:+.10g}j"
    return fmt_rational(Fraction(x))


def exponent_grid(generators, bound) -> list[Fraction]:
    """Elements ``< bound`` of the additive monoid spanned by positive ``generators``."""
    gens = sorted({Fraction(g) for g in generators if 0 < g < bound})
    if bound == INF:
        raise ValueError("the exponent grid needs a finite bound")
    seen = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                s = a + g
                if s < bound and s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(seen)


def _clean(r: NovikovScalar, tol: float) -> NovikovScalar:
    keep = [(e, c) for e, c in r.terms if abs(c) > tol]
    return NovikovScalar(keep, r.precision)


def _residual_valuation(problem: CriticalProblem, x) -> object:
    """Least valuation of the unnormalized equations at ``x`` (capped at E_max)."""
    vals = [f._eval(x).effective_valuation() for f in problem.reduced_system()]
    return min(min(vals, default=INF), problem.precision)


def newton_lift(problem: CriticalProblem, leading: LeadingSolution,
                ls: LeadingSystem | None = None) -> CriticalPoint:
    """Lift a nondegenerate residue solution to a solution modulo ``T^{E_max}``.

    Each step reads off ``s = min v(residual)`` of the normalized equations,
    solves ``J0 delta = -lead(residual)`` over the residue field and moves
    ``x += delta T^s``.  ``s`` must strictly increase and stay in the monoid
    generated by the exponents present.
    """
    if not leading.nondegenerate:
        raise DegenerateJacobian(
            f"leading Jacobian has corank {leading.corank} at {leading.as_dict()}; lift refused"
        )
    if ls is None:
        ls = leading_system(problem)
    if problem.precision == INF:
        # nothing to lift against; accept only an exact solution
        x = [NovikovScalar.constant(v) for v in leading.values]
        residual = _residual_valuation(problem, x)
        if residual != INF:
            raise PrecisionTooLow("lifting needs a finite target precision E_max")
        return CriticalPoint(ls.variables, tuple(x), INF, leading.det, leading.certificate,
                             tuple(leading.values), (), INF, INF, dict(problem.fixed),
                             ls.additive)
    numeric = leading.mode == "numeric"
    eqs = ls.normalized
    targets = [problem.precision - v for v in ls.valuations]
    if min(targets) <= 0:
        raise PrecisionTooLow(f"E_max = {fmt_precision(problem.precision)} is not above the "
                              "leading valuations")
    gens = set()
    for f in eqs:
        for c in f.terms.values():
            gens.update(e for e, _ in c.terms)
    for x in problem.fixed.values():
        gens.update(e for e, _ in x.terms)
    grid = exponent_grid(gens, max(targets))
    grid_set = set(grid)
    cap = 10 * len(grid) + 1

    x = [NovikovScalar.constant(v) for v in leading.values]
    J0 = [list(r) for r in leading.jacobian]
    schedule: list[Fraction] = []
    for _ in range(cap):
        res = [f._eval(x).truncate(t) for f, t in zip(eqs, targets)]
        if numeric:
            res = [_clean(r, NUMERIC_LIFT_TOL) for r in res]
        live = [r for r in res if not r.is_zero()]
        if not live:
            break
        s = min(r.valuation() for r in live)
        if schedule and s <= schedule[-1]:
            raise NonTerminating(f"residual valuation {fmt_rational(s)} did not increase "
                                 f"past {fmt_rational(schedule[-1])}")
        if s not in grid_set:
            raise NonTerminating(f"residual valuation {fmt_rational(s)} is off the exponent grid")
        schedule.append(s)
        lead = [-r.coefficient(s) for r in res]
        try:
            delta = _linalg.solve(J0, lead)
        except ZeroDivisionError:
            raise DegenerateJacobian("leading Jacobian became singular") from None
        x = [xi + NovikovScalar.monomial(d, s) if d != 0 else xi for xi, d in zip(x, delta)]
    else:
        raise NonTerminating(f"lifting exceeded {cap} iterations")

    coord_prec = min(targets)
    assignment = tuple(xi.truncate(coord_prec) for xi in x)
    residual = _residual_valuation(problem, x)
    epsilon = schedule[0] if schedule else INF
    return CriticalPoint(ls.variables, assignment, residual, leading.det, leading.certificate,
                         tuple(leading.values), tuple(schedule), epsilon, coord_prec,
                         dict(problem.fixed), ls.additive)


# -- classification --------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalityReport:
    order: object
    precision: object
    gradient: tuple[NovikovScalar, ...]
    meets: Mapping[str, bool]

    def to_dict(self) -> dict:
        return {
            "order": fmt_precision(self.order),
            "precision": fmt_precision(self.precision),
            "gradient": [str(g) for g in self.gradient],
            "meets": dict(sorted(self.meets.items())),
        }


def classify_point(source, point, thresholds: Mapping | None = None) -> CriticalityReport:
    """Criticality order ``E'`` of the full potential at ``point``.

    ``E'`` is the least valuation over the torus log-partials, capped at the
    potential precision.  Bulk variables missing from ``point`` are set to 0.
    """
    pf = source.potential if isinstance(source, CriticalProblem) else source
    if pf is None:
        raise ValueError("classification needs the full potential")
    if isinstance(point, CriticalPoint):
        point = point.point()
    if not isinstance(point, Mapping):
        point = dict(zip(pf.torus_variables, point))
    full = {v: NovikovScalar.coerce(point.get(v, 0)) for v in pf.variables}
    entries = pf.gradient(full).entries
    order = criticality_order(entries)
    if thresholds is None:
        thresholds = {}
        if pf.E5 is not None:
            thresholds["E5"] = pf.E5
            if pf.E1 is not None:
                thresholds["2E"] = 2 * (pf.E5 - pf.E1)
    meets = {k: order >= as_precision(v) for k, v in thresholds.items()}
    return CriticalityReport(order, pf.precision, tuple(entries), meets)
