from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floerpot.errors import NotAUnit, ParseError
from floerpot.novikov import INF, NovikovScalar, T
from strategies import scalars, units

N = NovikovScalar.parse


def test_add_cancels_to_zero():
    s = T(1) + (-T(1))
    assert s.is_zero()
    assert s.valuation() == INF


def test_add_merges_like_terms():
    assert N("1 + T^(1/2)") + T(Fraction(1, 2)) == N("1 + 2*T^(1/2)")


def test_add_zero_is_identity():
    a = N("3 - T^(2/3) + O(T^2)")
    assert a + NovikovScalar.zero() == a


def test_add_takes_min_precision():
    assert (N("1 + O(T^2)") + N("T + O(T^(3/2))")).precision == Fraction(3, 2)


def test_mul_adds_exponents():
    assert T(Fraction(1, 3)) * T(Fraction(2, 3)) == T(1)


def test_mul_binomial_mod_T3():
    assert N("(1 + T) + O(T^3)") * N("(1 - T) + O(T^3)") == N("1 - T^2 + O(T^3)")


def test_mul_valuation_additive():
    a, b = 2 * T(Fraction(1, 2)), 3 * T(Fraction(3, 2))
    assert (a * b).valuation() == 2


def test_mul_precision_rule():
    a = N("T^(1/2) + O(T^2)")
    b = N("1 + T + O(T^3)")
    # min(2 + 0, 3 + 1/2)
    assert (a * b).precision == 2


def test_valuation_examples():
    assert NovikovScalar.zero().valuation() == INF
    assert N("3*T^(1/2) + 5*T^2").valuation() == Fraction(1, 2)
    assert NovikovScalar.constant(7).valuation() == 0


def test_norm_is_exp_of_minus_valuation():
    import math

    assert N("T^2").norm() == pytest.approx(math.exp(-2))
    assert NovikovScalar.zero().norm() == 0


def test_membership_predicates():
    assert N("1 + T").in_lambda0() and not N("1 + T").in_lambda_plus()
    assert N("T^(1/2)").in_lambda_plus()
    assert not N("T^(-1)").in_lambda0()
    assert N("2 + T").is_unit() and not N("T").is_unit()


def test_invert_unit_examples():
    assert NovikovScalar.constant(2).invert_unit(5) == N("1/2 + O(T^5)")
    assert N("1 - T + O(T^3)").invert_unit(3) == N("1 + T + T^2 + O(T^3)")
    with pytest.raises(NotAUnit):
        T(Fraction(1, 2)).invert_unit(3)
    with pytest.raises(NotAUnit):
        T(-1).invert_unit(3)


def test_division_by_non_unit():
    q = N("T + T^2 + O(T^4)") / T(1)
    assert q == N("1 + T + O(T^3)")


def test_canonical_text():
    assert str(N("5*T^2 + 3*T^(1/2) - T^(1/2)")) == "2*T^(1/2) + 5*T^(2)"
    assert str(NovikovScalar.zero()) == "0"
    assert str(N("O(T^(7/8))")) == "O(T^(7/8))"
    assert str(N("-1 + 1/2*T^(5/8) + O(T)")) == "-1*T^(0) + 1/2*T^(5/8) + O(T^(1))"


@pytest.mark.parametrize("bad", ["", "T^", "1 +", "x", "O(T + T^2)", "1/0", "T^(1/2"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        N(bad)


def test_truncate_never_raises_precision():
    a = N("1 + T + O(T^2)")
    assert a.truncate(5).precision == 2
    assert a.truncate(1) == N("1 + O(T)")


def test_congruent():
    assert N("1 + T").congruent(N("1 + T + T^3"), 2)
    assert not N("1 + T").congruent(N("1"), 2)


@given(scalars())
def test_text_round_trip(a):
    assert N(str(a)) == a


@settings(max_examples=200)
@given(scalars(), scalars(), scalars())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert ((a * b) * c).congruent(a * (b * c), min((a * b * c).precision, (a * (b * c)).precision))
    lhs, rhs = a * (b + c), a * b + a * c
    assert lhs.congruent(rhs, min(lhs.precision, rhs.precision))


@settings(max_examples=200)
@given(scalars(precisions=[INF]), scalars(precisions=[INF]))
def test_valuation_axioms(a, b):
    assert (a + b).valuation() >= min(a.valuation(), b.valuation())
    if a.valuation() != b.valuation():
        assert (a + b).valuation() == min(a.valuation(), b.valuation())
    if not a.is_zero() and not b.is_zero():
        assert (a * b).valuation() == a.valuation() + b.valuation()


@given(units(), st.sampled_from([Fraction(1), Fraction(5, 2), Fraction(4)]))
def test_invert_unit_is_inverse(u, p):
    assert (u * u.invert_unit(p)).congruent(NovikovScalar.one(), p)


@given(scalars(precisions=[INF]), scalars(precisions=[INF]),
       st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(2)]))
def test_truncation_is_homomorphism(a, b, E):
    ta, tb = a.truncate(E), b.truncate(E)
    assert (a + b).truncate(E) == (ta + tb).truncate(E)
    assert (a * b).truncate(E) == (ta * tb).truncate(E)


def test_complex_coefficients_use_tolerance():
    a = NovikovScalar.constant(1 + 1j)
    assert (a - NovikovScalar.constant(1 + 1j + 1e-14)).is_zero()
    assert (a * a).coefficient(0) == 2j
