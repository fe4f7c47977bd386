import math

import pytest
import scipy.integrate
from hypothesis import given
from hypothesis import strategies as st

from ncchern.bott import (
    LAM,
    GaussianForm,
    NaturalOneForm,
    bott_chern,
    collapsed_exp_bott,
    deRham_d,
    dirac_coefficient,
    fedosov_T,
    fedosov_exp_bott,
    fundamental_cocycle,
    integrate_top,
    pair_bott_dirac,
    wedge,
)
from ncchern.errors import NotIntegrable, NotTopDegree, ParityMismatch
from ncchern.scalars import Gaussian, MonomialSum, lower
from ncchern.suites import DEFAULTS, suite_bott

PI = MonomialSum.monomial(1, 2, 0)


def test_d_of_gaussian():
    n = 3
    g = GaussianForm.gaussian(n)
    expect = GaussianForm.zero(n)
    for u in range(n):
        expect = expect + wedge(GaussianForm.coordinate(n, u), wedge(g, GaussianForm.dx(n, u))) * (LAM * -2)
    assert deRham_d(g) == expect


def test_dx_antisymmetry():
    assert GaussianForm.dx(2, 1, 0) == -GaussianForm.dx(2, 0, 1)
    assert not GaussianForm.dx(3, 1, 1)
    assert not deRham_d(deRham_d(wedge(GaussianForm.coordinate(2, 0), GaussianForm.gaussian(2))))


@st.composite
def even_forms(draw, n=2):
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        alpha = tuple(draw(st.integers(0, 2)) for _ in range(n))
        m = draw(st.integers(0, 1))
        I = draw(st.sampled_from([(), (0, 1)]))
        terms[(alpha, m, I)] = draw(st.integers(-3, 3))
    return GaussianForm(n, terms)


@given(even_forms(), even_forms(), even_forms())
def test_fedosov_product_associative(x, y, z):
    assert fedosov_T(fedosov_T(x, y), z) == fedosov_T(x, fedosov_T(y, z))


def test_fedosov_needs_even_forms():
    with pytest.raises(ParityMismatch):
        fedosov_T(GaussianForm.dx(2, 0), GaussianForm.gaussian(2))


def _polynomial(w):
    return GaussianForm(w.n, {(a, 0, I): c for (a, m, I), c in w.terms.items()})


@given(even_forms(), even_forms())
def test_fedosov_commutators_integrate_to_zero(x, y):
    # one damped factor keeps the Gaussian exponent at lam |x|^2
    x = wedge(_polynomial(x), GaussianForm.gaussian(2))
    y = _polynomial(y)
    comm = fedosov_T(x, y) - fedosov_T(y, x)
    assert integrate_top(comm.component(2)) == 0


def test_integral_against_quadrature():
    lam = 1.0
    # n = 1: x^2 exp(-lam x^2) dx
    w1 = wedge(wedge(GaussianForm.coordinate(1, 0), GaussianForm.coordinate(1, 0)),
               wedge(GaussianForm.gaussian(1), GaussianForm.dx(1, 0)))
    num, _ = scipy.integrate.quad(lambda x: w1.coefficient((0,), [x], lam).real, -math.inf, math.inf)
    assert abs(lower(integrate_top(w1), lam) - num) < 1e-8
    # n = 2: x1^2 x2^2 exp(-2 lam x^2) ... use m = 4 for an exact moment
    x1, x2 = GaussianForm.coordinate(2, 0), GaussianForm.coordinate(2, 1)
    g = GaussianForm.gaussian(2)
    w2 = wedge(wedge(wedge(x1, x1), wedge(x2, x2)), wedge(wedge(g, wedge(g, wedge(g, g))), GaussianForm.dx(2, 0, 1)))
    num, _ = scipy.integrate.dblquad(
        lambda y, x: w2.coefficient((0, 1), [x, y], lam).real, -8, 8, -8, 8, epsabs=1e-12
    )
    assert abs(lower(integrate_top(w2), lam) - num) < 1e-8


def test_integral_examples():
    g1 = wedge(GaussianForm.coordinate(1, 0), wedge(GaussianForm.gaussian(1), GaussianForm.dx(1, 0)))
    assert integrate_top(g1) == 0
    reordered = wedge(GaussianForm.gaussian(2), GaussianForm.dx(2, 1, 0))
    assert integrate_top(reordered) == -PI / LAM
    with pytest.raises(NotTopDegree):
        integrate_top(GaussianForm.gaussian(2))
    with pytest.raises(NotIntegrable):
        integrate_top(GaussianForm.dx(1, 0))
    with pytest.raises(NotIntegrable):
        integrate_top(wedge(wedge(GaussianForm.gaussian(1), GaussianForm.gaussian(1)), GaussianForm.dx(1, 0)))


def test_stokes_on_the_line():
    w = wedge(GaussianForm.coordinate(1, 0), GaussianForm.gaussian(1))
    assert integrate_top(deRham_d(w)) == 0
    v = wedge(GaussianForm.coordinate(2, 1), wedge(GaussianForm.gaussian(2), GaussianForm.dx(2, 0)))
    assert integrate_top(deRham_d(v)) == 0


def test_bott_chern_in_two_dimensions():
    ch = bott_chern(2)
    expect = wedge(GaussianForm.gaussian(2), GaussianForm.dx(2, 0, 1)) * (LAM * Gaussian(0, 4))
    assert ch == expect
    # the fundamental class on exp(-lam x^2) dx1 dx2 gives 1/(4 i lam)
    unit = wedge(GaussianForm.gaussian(2), GaussianForm.dx(2, 0, 1))
    assert fundamental_cocycle(2, unit) == (LAM * Gaussian(0, 4)).inverse()


def test_odd_chains_pair_to_zero_in_even_dimension():
    assert fundamental_cocycle(2, NaturalOneForm(2, [])) == 0
    assert fundamental_cocycle(1, GaussianForm.gaussian(1)) == 0


def test_dirac_coefficient_values():
    # 1!/(2! (2 pi i)) = 1/(4 pi i)
    assert dirac_coefficient(2) * MonomialSum.monomial(Gaussian(0, 4), 2, 0) == 1
    # -1/(1! (1 + i) pi^(1/2))
    assert dirac_coefficient(1) * MonomialSum.monomial(Gaussian(1, 1), 1, 0) == -1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("method", ["closed_form", "fedosov_exp"])
def test_pairing_is_one(n, method):
    assert pair_bott_dirac(n, method) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_routes_agree(n):
    a, b = bott_chern(n), bott_chern(n, "fedosov_exp")
    if n % 2:
        assert a.normal_form() == b.normal_form()
    else:
        assert a == b
    _, _, F = fedosov_exp_bott(n)
    assert not (F - collapsed_exp_bott(n)).terms


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_pairing_by_quadrature_is_lambda_independent(lam):
    ch = bott_chern(2)
    re, _ = scipy.integrate.dblquad(lambda y, x: ch.coefficient((0, 1), [x, y], lam).real, -12, 12, -12, 12)
    im, _ = scipy.integrate.dblquad(lambda y, x: ch.coefficient((0, 1), [x, y], lam).imag, -12, 12, -12, 12)
    value = lower(dirac_coefficient(2), lam) * complex(re, im)
    assert abs(value - 1) < 1e-8


def test_bott_suite():
    assert all(c.status == "pass" for c in suite_bott(dict(DEFAULTS)))
