import random
from fractions import Fraction

import pytest

from floerpot.errors import MissingCertificate, PrecisionExhausted
from floerpot.floer import (
    NovikovMatrix, displacement_bounds, exterior_basis, flag_disk_energies,
    flag_example_report, limit_lambda_bound, torsion_decomposition, wedge_differential,
)
from floerpot.novikov import INF, NovikovScalar, T
from floerpot.polytope import PiMultiple
from floerpot.potential import build_potential, cotangent_spec
from floerpot.solver import classify_point
from strategies import random_scalar, random_unit

Q = Fraction
N = NovikovScalar.parse


def test_exterior_basis_order():
    assert exterior_basis(2) == [(), (0,), (1,), (0, 1)]
    assert len(exterior_basis(3)) == 8


def test_zero_gradient_differential():
    d = wedge_differential([NovikovScalar.zero()] * 3)
    assert d.shape == (8, 8) and d.is_zero()
    td = torsion_decomposition(d)
    assert td.betti == 8 and td.torsions == ()


def test_single_direction_differential():
    a = Q(1, 3)
    d = wedge_differential([T(a), 0, 0])
    nz = [d[i, j] for i in range(8) for j in range(8) if not d[i, j].is_zero()]
    assert len(nz) == 4 and all(x in (T(a), -T(a)) for x in nz)
    td = torsion_decomposition(d)
    assert td.rank == 4 and td.betti == 0 and td.torsions == (a,) * 4


def test_wedge_squares_to_zero():
    d = wedge_differential([N("1 + T"), N("-T^(1/2)"), N("2*T^(1/3)")])
    assert (d @ d).is_zero()


def test_gradient_length_checked():
    with pytest.raises(ValueError):
        wedge_differential([1, 1], n=3)


def test_identity_and_diagonal_torsion():
    td = torsion_decomposition(NovikovMatrix.identity(3), as_differential=False)
    assert td.betti == 0 and td.torsions == ()
    D = NovikovMatrix.diagonal([T(Q(1, 2)), 1, T(2)])
    td = torsion_decomposition(D, as_differential=False)
    assert td.torsions == (Q(1, 2), 2) and td.betti == 0
    assert td.describe() == "Λ0/T^(1/2) + Λ0/T^(2)"


def test_diagonal_beyond_precision_is_free():
    D = NovikovMatrix.diagonal([T(Q(1, 2)), T(3)], precision=Q(2))
    td = torsion_decomposition(D, as_differential=False)
    assert td.torsions == (Q(1, 2),) and td.betti == 1 and td.min_torsion == Q(1, 2)


def test_potential_critical_point_torsion():
    pf = build_potential(cotangent_spec(E5=Q(7, 8)), Q(7, 8))
    td = torsion_decomposition(wedge_differential(pf.gradient((1, 1, -1)).entries))
    assert td.describe() == "(Λ0/T^(7/8))^8" and td.min_torsion == Q(7, 8)


def test_torsion_matches_criticality_order():
    pf = build_potential(cotangent_spec(E5=Q(7, 8)), Q(7, 8))
    for pt in [(1, 1, -1), (1, 1, 1), (-1, -1, -1), (1, -1, 1)]:
        rep = classify_point(pf, pt)
        td = torsion_decomposition(wedge_differential(pf.gradient(pt).entries))
        assert td.min_torsion == rep.order


def test_precision_exhausted():
    M = NovikovMatrix(((T(1), N("O(T^(1/2))")), (0, T(1))), Q(2))
    with pytest.raises(PrecisionExhausted):
        torsion_decomposition(M, as_differential=False)


def test_non_differential_refused():
    with pytest.raises(ValueError):
        torsion_decomposition(NovikovMatrix.identity(2), as_differential=True)


def _random_unimodular(rng, n, P):
    """Product of a unit lower and a unit upper triangular matrix over Lambda_0."""
    L = [[random_unit(rng, P) if i == j else (random_scalar(rng, nonneg=True, precision=P)
                                             if i > j else 0) for j in range(n)]
         for i in range(n)]
    U = [[random_unit(rng, P) if i == j else (random_scalar(rng, nonneg=True, precision=P)
                                             if i < j else 0) for j in range(n)]
         for i in range(n)]
    return NovikovMatrix(L, P) @ NovikovMatrix(U, P)


def test_torsion_invariant_under_unimodular():
    rng = random.Random(7)
    P = Q(4)
    for _ in range(20):
        D = NovikovMatrix.diagonal([T(rng.choice([0, Q(1, 2), 1, Q(3, 2)])) for _ in range(3)], P)
        M = _random_unimodular(rng, 3, P) @ D @ _random_unimodular(rng, 3, P)
        a = torsion_decomposition(D, as_differential=False)
        b = torsion_decomposition(M, as_differential=False)
        assert (a.torsions, a.betti) == (b.torsions, b.betti)


def test_displacement_bounds_from_certificates():
    pf = build_potential(cotangent_spec(E5=Q(7, 8)), Q(7, 8))
    rep = classify_point(pf, (1, 1, -1))
    b = displacement_bounds(Q(1, 4), Q(7, 8), criticality=rep)
    assert b.bound_X == Q(7, 8) and b.bound_mixed is None
    assert b.to_dict() == {"hofer_X": "7/8"}


def test_displacement_needs_a_certificate():
    pf = build_potential(cotangent_spec(E5=Q(7, 8)), Q(7, 8))
    rep = classify_point(pf, (1, 1, 1))
    with pytest.raises(MissingCertificate):
        displacement_bounds(Q(1, 4), Q(7, 8), criticality=rep)
    with pytest.raises(ValueError):
        displacement_bounds(Q(1, 4), Q(1, 8), criticality=rep)


def test_limit_bound_extrapolates_affine_samples():
    lb = limit_lambda_bound([(Q(1, 4), Q(1, 4), Q(7, 8)), (Q(1, 8), Q(1, 8), Q(7, 8))])
    assert lb.extrapolated and lb.bound_mixed == Q(7, 4)
    lb = limit_lambda_bound([(Q(1, 4), Q(1, 4), 1), (Q(1, 8), Q(1, 8), Q(7, 8)),
                             (Q(1, 16), Q(1, 16), Q(7, 8))])
    assert not lb.extrapolated and lb.bound_mixed == Q(13, 8)


def test_flag_report_two_one():
    r = flag_example_report(2, 1)
    assert r.norm_X == PiMultiple(Q(10)) and r.norm_S == PiMultiple(Q(0))
    assert r.floor == PiMultiple(Q(4)) and r.holds
    assert r.argmax == ((2, 1, 1),) and r.argmin == ((1, -3, 1),)
    assert str(r.slack) == "6π" and r.ratio == Q(5, 2)


def test_flag_report_tight_case():
    r = flag_example_report(1, 0)
    assert r.norm_X == r.floor == PiMultiple(Q(4))


def test_flag_disk_energies():
    assert flag_disk_energies(2, 1) == (PiMultiple(Q(2)), PiMultiple(Q(8)))


def test_flag_parameters_checked():
    with pytest.raises(ValueError):
        flag_example_report(1, 2)
    with pytest.raises(ValueError):
        flag_example_report(1, -1)


def test_matrix_precision_truncates_entries():
    M = NovikovMatrix(((N("1 + T^2"),),), Q(1))
    assert M[0, 0] == N("1 + O(T)") and M.precision == 1
    assert NovikovMatrix.zeros(2, 3).shape == (2, 3)
    assert NovikovMatrix.identity(2).precision == INF
