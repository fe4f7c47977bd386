from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncchern.errors import ModeError
from ncchern.scalars import SQRT_2I, Gaussian, MonomialSum, lower, mode_of

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=20)
gaussians = st.builds(Gaussian, rationals, rationals)


def test_sqrt_2i_squares_to_2i():
    assert SQRT_2I * SQRT_2I == Gaussian(0, 2)
    assert Gaussian(1, 1) ** 2 == Gaussian(0, 2)


@given(gaussians, gaussians, gaussians)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0
    if a != 0:
        assert a * (1 / a) == 1


def test_exact_and_float_do_not_mix():
    with pytest.raises(ModeError):
        Gaussian(1) + 0.5
    with pytest.raises(ModeError):
        Gaussian(0.5)
    with pytest.raises(ModeError):
        MonomialSum.monomial(1, 1, 0) * 1.0


def test_monomial_merging_and_zero_drop():
    s = MonomialSum({(1, 2): 3}) + MonomialSum({(1, 2): -3}) + MonomialSum({(0, 0): Fraction(1, 2)})
    assert s.terms == {(0, 0): Fraction(1, 2)}
    assert MonomialSum({(1, 1): 0}).terms == {}


def test_monomial_inverse_and_powers():
    m = MonomialSum.monomial(Gaussian(0, 2), 1, -1)
    assert m * m.inverse() == 1
    assert MonomialSum.monomial(1, 1, 0) ** 2 == MonomialSum.monomial(1, 2, 0)


def test_lowering_binds_pi_and_lambda():
    import math

    m = MonomialSum.monomial(Gaussian(1, 1), 2, -2)
    assert lower(m, 4.0) == pytest.approx((1 + 1j) * math.pi / 4)
    assert lower(Gaussian(2, -1)) == 2 - 1j
    assert mode_of(m) == "symbolic" and mode_of(Fraction(1, 3)) == "exact" and mode_of(1.5) == "float"
