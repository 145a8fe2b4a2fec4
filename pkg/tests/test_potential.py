import json
from fractions import Fraction

import pytest

from floerpot.errors import (
    BasepointExcluded, BasepointOnFacet, ParseError, PrecisionTooLow, WeightTooSmall,
)
from floerpot.laurent import LaurentPoly
from floerpot.novikov import INF, NovikovScalar, T
from floerpot.polytope import Facet, cotangent_s3_polytope
from floerpot.potential import (
    BulkWeight, OutsideTerm, PotentialFunction, PotentialSpec, apply_bulk, build_potential,
    compactify, cotangent_spec, monotone_basepoints, quadric_spec,
)

Q = Fraction
XYZ = ("x", "y", "z")


def test_cotangent_potential_terms():
    pf = build_potential(cotangent_spec(Q(1, 4)))
    expected = LaurentPoly.parse("T^(1/4)*(x + y^-1 + x*z^-1 + y^-1*z)", XYZ)
    assert pf.poly == expected
    assert pf.precision == INF and pf.E1 == Q(1, 4)


def test_quadric_potential_has_five_terms():
    pf = build_potential(quadric_spec())
    assert len(pf.poly.terms) == 5
    assert all(c == T(Q(1, 3)) for c in pf.poly.terms.values())


def test_facet_term_bijection():
    spec = cotangent_spec(Q(1, 5), E5=Q(1))
    pf = build_potential(spec)
    assert [lab for lab, _, _ in pf.facet_terms] == spec.polytope.labels
    assert {tuple(n) for _, n, _ in pf.facet_terms} == set(pf.poly.terms)


def test_uniform_valuations_on_monotone_line():
    P = cotangent_s3_polytope()
    line = monotone_basepoints(P)
    for lam in (Q(1, 8), Q(1, 4), Q(3, 7)):
        spec = PotentialSpec(cotangent_s3_polytope(line.at(lam)))
        vals = {c.valuation() for c in build_potential(spec).poly.terms.values()}
        assert vals == {lam}


def test_off_line_valuations_differ():
    spec = PotentialSpec(cotangent_s3_polytope((Q(1, 2), Q(-1, 4), 0)))
    assert len({c.valuation() for c in build_potential(spec).poly.terms.values()}) > 1


def test_basepoint_on_facet():
    with pytest.raises(BasepointOnFacet):
        build_potential(PotentialSpec(cotangent_s3_polytope((0, 0, 0))))


def test_basepoint_required():
    with pytest.raises(ValueError):
        PotentialSpec(cotangent_s3_polytope())


def test_default_precision_is_twice_gap():
    spec = cotangent_spec(E5=Q(7, 8))
    assert spec.E == Q(5, 8) and spec.default_precision == Q(5, 4)
    assert build_potential(spec).precision == Q(5, 4)


def test_precision_can_only_be_lowered():
    spec = cotangent_spec(E5=Q(7, 8))
    assert build_potential(spec, Q(7, 8)).precision == Q(7, 8)
    with pytest.raises(ValueError):
        build_potential(spec, Q(2))


def test_precision_below_first_energy():
    with pytest.raises(PrecisionTooLow):
        build_potential(cotangent_spec(E5=Q(7, 8)), Q(1, 8))
    with pytest.raises(PrecisionTooLow):
        build_potential(cotangent_spec(E5=Q(7, 8)), Q(1, 4))


def test_bulk_zero_weight_is_identity():
    spec = cotangent_spec(E5=Q(7, 8), bulk=(BulkWeight("K1", NovikovScalar.zero()),))
    pf = build_potential(spec)
    assert apply_bulk(pf, spec).poly == pf.poly


def test_bulk_weight_below_gap_refused():
    with pytest.raises(WeightTooSmall):
        spec = cotangent_spec(E5=Q(7, 8), bulk=(BulkWeight("K1", T(Q(5, 16))),))
        apply_bulk(build_potential(spec), spec)


def test_bulk_weight_at_gap_accepted():
    spec = cotangent_spec(E5=Q(7, 8), bulk=(BulkWeight("K1", T(Q(5, 8))),))
    deformed = apply_bulk(build_potential(spec), spec)
    expected = LaurentPoly.parse("T^(1/4)*x + T^(7/8)*x + T^(1/4)*(y^-1 + x*z^-1 + y^-1*z)"
                                 " + O(T^(5/4))", XYZ)
    assert deformed.poly == expected


def test_symbolic_bulk_difference_divisible_by_weight():
    spec = cotangent_spec(E5=Q(7, 8), bulk=(BulkWeight("K1", "w"),))
    pf = build_potential(spec)
    deformed = apply_bulk(pf, spec)
    assert deformed.variables == ("w",) + XYZ and deformed.bulk_variables == ("w",)
    diff = deformed.poly - pf.poly.with_variables(deformed.variables)
    assert diff.terms and all(m[0] >= 1 for m in diff.terms)
    # setting w = 0 recovers the undeformed potential
    assert deformed.poly.substitute({"w": 0}) == pf.poly


def test_bulk_only_on_local_facets():
    spec = compactify(cotangent_spec(E5=Q(7, 8)), ((-1, 1, 0), -1, "D"))
    with pytest.raises(ValueError):
        PotentialSpec(spec.polytope, bulk=(BulkWeight("D", "w"),), E5=Q(7, 8))


def test_bulk_needs_declared_gap():
    spec = cotangent_spec(bulk=(BulkWeight("K1", "w"),))
    with pytest.raises(ValueError):
        apply_bulk(build_potential(spec), spec)


@pytest.mark.parametrize("lam", [Q(1, 8), Q(1, 4), Q(1, 3)])
def test_compactify_cut_energy(lam):
    spec = compactify(cotangent_spec(lam), ((-1, 1, 0), -1, "D"))
    assert spec.E_cut == 1 - 2 * lam
    assert spec.polytope.facet("D").cut


def test_compactify_excludes_basepoint():
    with pytest.raises(BasepointExcluded):
        compactify(cotangent_spec(Q(1, 2)), Facet((-1, 1, 0), -1, "D"))


def test_energy_ordering_validated():
    with pytest.raises(ValueError):
        cotangent_spec(E5=Q(1, 8))
    with pytest.raises(ValueError):
        cotangent_spec(E5=Q(1, 2), require_gap=True)
    cotangent_spec(E5=Q(7, 8), require_gap=True)


def test_outside_terms():
    with pytest.raises(ValueError):
        cotangent_spec(outside_terms=(OutsideTerm((2, 1, 0), Q(7, 8)),))
    with pytest.raises(ValueError):
        cotangent_spec(E5=Q(7, 8), outside_terms=(OutsideTerm((2, 1, 0), Q(1, 2)),))
    spec = cotangent_spec(E5=Q(7, 8), outside_terms=(OutsideTerm((2, 1, 0), Q(7, 8)),))
    assert build_potential(spec).poly.terms[(2, 1, 0)] == T(Q(7, 8)).truncate(Q(5, 4))


def test_spec_json_round_trip():
    spec = cotangent_spec(E5=Q(7, 8), bulk=(BulkWeight("K1", "w"),),
                          outside_terms=(OutsideTerm((2, 1, 0), Q(7, 8)),))
    again = PotentialSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert build_potential(again).poly == build_potential(spec).poly
    assert again.bulk == spec.bulk


def test_potential_json_round_trip():
    spec = cotangent_spec(E5=Q(7, 8), bulk=(BulkWeight("K1", "w"),))
    pf = apply_bulk(build_potential(spec), spec)
    again = PotentialFunction.from_dict(json.loads(json.dumps(pf.to_dict())))
    assert again.poly == pf.poly and again.bulk_variables == pf.bulk_variables
    assert again.E1 == pf.E1 and again.E5 == pf.E5


def test_spec_malformed():
    with pytest.raises(ParseError):
        PotentialSpec.from_dict({"polytope": {"dim": 3}})
