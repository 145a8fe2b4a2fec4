"""Random Novikov data shared by the property tests."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from floerpot.novikov import INF, NovikovScalar

EXPONENTS = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3),
             Fraction(1), Fraction(3, 2), Fraction(2)]
PRECISIONS = [INF, Fraction(5, 2), Fraction(3)]


@st.composite
def scalars(draw, nonneg=True, max_terms=4, precisions=PRECISIONS):
    exps = EXPONENTS if nonneg else EXPONENTS + [Fraction(-1), Fraction(-1, 2)]
    terms = draw(st.lists(st.tuples(st.sampled_from(exps), st.integers(-4, 4)), max_size=max_terms))
    return NovikovScalar([(e, Fraction(c)) for e, c in terms], draw(st.sampled_from(precisions)))


@st.composite
def units(draw):
    lead = draw(st.integers(1, 5)) * draw(st.sampled_from([1, -1]))
    rest = draw(st.lists(st.tuples(st.sampled_from(EXPONENTS[1:]), st.integers(-3, 3)),
                         max_size=3))
    return NovikovScalar([(Fraction(0), Fraction(lead))] + [(e, Fraction(c)) for e, c in rest])


def random_scalar(rng: random.Random, nonneg=True, precision=None, max_terms=4) -> NovikovScalar:
    exps = EXPONENTS if nonneg else EXPONENTS + [Fraction(-1), Fraction(-1, 2)]
    n = rng.randint(0, max_terms)
    terms = [(rng.choice(exps), Fraction(rng.randint(-4, 4))) for _ in range(n)]
    prec = rng.choice(PRECISIONS) if precision is None else precision
    return NovikovScalar(terms, prec)


def random_unit(rng: random.Random, precision=INF) -> NovikovScalar:
    lead = Fraction(rng.choice([1, -1, 2, -2, 3]))
    terms = [(Fraction(0), lead)]
    terms += [(rng.choice(EXPONENTS[1:]), Fraction(rng.randint(-2, 2)))
              for _ in range(rng.randint(0, 2))]
    return NovikovScalar(terms, precision)
