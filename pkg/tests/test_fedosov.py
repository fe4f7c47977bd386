from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from ncchern.algebra import UNIT, complex_numbers, matrix_algebra, nilpotent_polynomials
from ncchern.errors import ParityMismatch
from ncchern.fedosov import (
    ExpScaled,
    TensorElem,
    fedosov_exp,
    fedosov_product,
    idempotent_e_hat,
    lift_rho_star,
    mult_map,
    x_boundary_b,
    x_boundary_d,
)
from ncchern.fixtures import bivariant_nil, random_exact_chain
from ncchern.forms import NCForm, differential_d, form_product, hochschild_b, karoubi_kappa
from ncchern.opforms import OperatorForm, fedosov_op_product

C = complex_numbers()
M2 = matrix_algebra(2)


def T(A, *w, c=1, trunc=6):
    return TensorElem(A, {tuple(w): c}, trunc)


@st.composite
def even_forms(draw, A=M2, degrees=(0, 2), trunc=6):
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        n = draw(st.sampled_from(degrees))
        a0 = draw(st.integers(-1, A.dim - 1))
        w = (UNIT if a0 < 0 else a0,) + tuple(draw(st.lists(st.integers(0, A.dim - 1), min_size=n, max_size=n)))
        terms[w] = Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 2)))
    return TensorElem(A, terms, trunc)


def test_idempotent_square_in_c():
    e = T(C, 0)
    assert fedosov_product(e, e) == e - T(C, UNIT, 0, 0)


def test_unit_and_parity():
    x = T(M2, 1, 2, 0)
    one = T(M2, UNIT)
    assert fedosov_product(one, x) == x == fedosov_product(x, one)
    with pytest.raises(ParityMismatch):
        TensorElem(M2, {(0, 1): 1})


def test_product_of_curvatures_matches_expansion():
    a = 1  # E12
    x = T(M2, UNIT, a, a, trunc=8)
    expect = form_product(x, x) - form_product(differential_d(x), differential_d(x))
    assert fedosov_product(x, x) == expect


@given(even_forms(), even_forms(), even_forms())
def test_fedosov_product_associative(x, y, z):
    assert fedosov_product(fedosov_product(x, y), z) == fedosov_product(x, fedosov_product(y, z))


@given(even_forms(), even_forms())
def test_mult_map_is_multiplicative(x, y):
    lhs = mult_map(fedosov_product(x, y))
    rhs = M2.multiply(mult_map(x), mult_map(y))
    # UNIT entries multiply as the adjoined unit
    assert {k: v for k, v in lhs.items() if v} == {k: v for k, v in rhs.items() if v}


def test_mult_map_examples():
    assert mult_map(idempotent_e_hat(6)) == {0: 1}
    assert mult_map(T(M2, 0, 1, 2)) == {}


def test_natural_d_on_degree_zero():
    assert x_boundary_d(T(M2, 1)) == NCForm.word(M2, (UNIT, 1))


def test_bbar_on_one_form():
    w = NCForm.word(M2, (1, 2))
    dw = differential_d(w)
    assert x_boundary_b(w) == hochschild_b(w) - dw - karoubi_kappa(dw)
    assert hochschild_b(w) == NCForm.word(M2, (0,)) - NCForm.word(M2, (3,))


@given(even_forms(trunc=7))
def test_x_complex_squares_to_zero(x):
    # b-bar natural-d vanishes on the nose for the form realization
    assert not x_boundary_b(x_boundary_d(x))


def test_idempotent_coefficients():
    assert idempotent_e_hat(0) == T(C, 0, trunc=0)
    e2 = idempotent_e_hat(2)
    assert e2 == TensorElem(C, {(0,): 1, (0, 0, 0): 2, (UNIT, 0, 0): -1}, 2)


def test_idempotent_is_idempotent_and_closed():
    e = idempotent_e_hat(8)
    assert fedosov_product(e, e) == e
    assert not x_boundary_d(e)


# lifts of representations


def test_lift_of_degree_zero():
    T0 = bivariant_nil(np.random.default_rng(1))
    a = 1
    x = T(M2, a, trunc=4)
    assert (lift_rho_star(T0.rho, x) - T0.rho[a]).max_abs() == 0


def test_lift_of_idempotent_is_identity():
    rho = {0: OperatorForm.constant(nilpotent_polynomials(3), np.eye(2, dtype=complex), 1)}
    L = lift_rho_star(rho, idempotent_e_hat(4))
    assert L.form_degrees() == [0]
    assert np.allclose(L.scalar_part(), np.eye(2))


def test_lift_is_multiplicative():
    rng = np.random.default_rng(2)
    T0 = bivariant_nil(rng)
    for _ in range(4):
        x = TensorElem.of(random_exact_chain(M2, [0, 2], rng, trunc=4))
        y = TensorElem.of(random_exact_chain(M2, [0, 2], rng, trunc=4))
        lhs = lift_rho_star(T0.rho, fedosov_product(x, y))
        rhs = fedosov_op_product(lift_rho_star(T0.rho, x), lift_rho_star(T0.rho, y))
        assert (lhs - rhs).max_abs() < 1e-12


# Fedosov exponential


def test_exp_of_closed_form_is_matrix_exponential():
    B = nilpotent_polynomials(3)
    H0 = np.array([[0.3, 1.0], [-0.2, 0.1j]])
    H = OperatorForm.constant(B, H0, 2)
    E = fedosov_exp(H)
    assert E.form_degrees() == [0]
    assert np.allclose(E.scalar_part(), scipy.linalg.expm(H0), atol=1e-13)


def test_exp_matches_fedosov_power_series():
    rng = np.random.default_rng(0)
    B = nilpotent_polynomials(3)
    H0 = 0.5 * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    terms = {(UNIT,): H0}
    for k in range(B.dim):
        terms[(k,)] = 0.5 * rng.normal(size=(2, 2))
    H = OperatorForm(B, 2, 0, terms, 2)
    series = H._like({(UNIT,): np.eye(2, dtype=complex)})
    power = series
    for k in range(1, 40):
        power = fedosov_op_product(power, H) * (1 / k)
        series = series + power
    assert (fedosov_exp(H) - series).max_abs() < 1e-9


def test_exact_mode_factors_out_scalar_part():
    B = nilpotent_polynomials(3)
    one = np.array([[1, 0], [0, 1]], dtype=object)
    x = np.array([[0, 1], [0, 0]], dtype=object)
    H = OperatorForm(B, 2, 0, {(UNIT,): -2 * one, (0,): x}, 2)
    out = fedosov_exp(H, mode="exact")
    assert isinstance(out, ExpScaled) and out.exponent == -2
    # x^2 = 0 so e^{x} = 1 + x, with the dx dx correction
    expect = fedosov_op_product(H._like({(UNIT,): one}), H._like({(UNIT,): one}))
    series = expect + H._like({(0,): x})
    square = fedosov_op_product(H._like({(0,): x}), H._like({(0,): x}))
    series = series + square * Fraction(1, 2)
    assert (out.body - series).max_abs() == 0
