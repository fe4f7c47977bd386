from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncchern.algebra import UNIT, matrix_algebra
from ncchern.bar import (
    BarBimodElem,
    BarChain,
    BarCochain,
    MatrixDGA,
    bar_bprime,
    bimod_bdprime,
    cochain_from_map,
    coderivation_partial,
    convolve,
    coproduct,
    cotrace_natural,
    delta_R,
    delta_intertwines_b,
    partial_product_intertwines_B,
    unit_cochain,
)
from ncchern.errors import PreconditionViolated
from ncchern.forms import NCForm, hochschild_b
from ncchern.suites import DEFAULTS, suite_bar

M2 = matrix_algebra(2)
E11, E12, E21, E22 = range(4)


def target():
    delta = np.zeros((4, 4), dtype=object)
    delta[2, 0], delta[3, 1], delta[2, 1] = 1, 2, -1
    return MatrixDGA(2, 2, delta)


def even_matrix(seed):
    rng = np.random.default_rng(seed)
    m = np.zeros((4, 4), dtype=object)
    for i in range(4):
        for j in range(4):
            if (i >= 2) == (j >= 2):
                m[i, j] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    return m


def chain(*w):
    return BarChain(M2, {tuple(w): 1})


def test_bprime_examples():
    assert not bar_bprime(chain(E12))
    assert bar_bprime(chain(E12, E21)) == chain(E11)
    assert bar_bprime(chain(E12, E21, E11)) == chain(E11, E11) - chain(E12, E21)


def test_coproduct_examples():
    assert coproduct(chain(E12)) == {((), (E12,)): 1, ((E12,), ()): 1}
    assert len(coproduct(chain(E12, E21))) == 3


letters = st.sampled_from([UNIT, E11, E12, E21, E22])


@given(st.lists(letters, max_size=5))
def test_coassociativity(w):
    c = BarChain(M2, {tuple(w): 1})
    left, right = {}, {}
    for (x, y), v in coproduct(c).items():
        for (x1, x2), u in coproduct(BarChain(M2, {x: 1})).items():
            left[x1, x2, y] = left.get((x1, x2, y), 0) + u * v
        for (y1, y2), u in coproduct(BarChain(M2, {y: 1})).items():
            right[x, y1, y2] = right.get((x, y1, y2), 0) + u * v
    assert left == right


@given(st.lists(letters, min_size=2, max_size=6))
def test_bprime_squares_to_zero(w):
    assert not bar_bprime(bar_bprime(BarChain(M2, {tuple(w): 1})))


def test_partial_and_bdprime_examples():
    e = BarBimodElem(M2, {((E11,), E12, (E21,)): 1})
    assert coderivation_partial(e) == chain(E11, E12, E21)
    assert not bimod_bdprime(BarBimodElem(M2, {((), E12, ()): 1}))


@given(st.lists(letters, min_size=4, max_size=4), st.integers(0, 3))
def test_partial_intertwines(w, i):
    e = BarBimodElem(M2, {(tuple(w[:i]), w[i], tuple(w[i + 1:])): 1})
    assert coderivation_partial(bimod_bdprime(e)) == bar_bprime(coderivation_partial(e))


def test_cotrace_examples():
    assert cotrace_natural(NCForm.word(M2, (E12,))) == BarBimodElem(M2, {((), E12, ()): 1})
    got = cotrace_natural(NCForm.word(M2, (E21, E12)))
    assert got == BarBimodElem(M2, {((E12,), E21, ()): -1, ((), E21, (E12,)): 1})


@given(st.lists(letters, min_size=3, max_size=3).filter(lambda w: UNIT not in w[1:]))
def test_cotrace_intertwines_b(w):
    eta = NCForm.word(M2, tuple(w))
    assert cotrace_natural(hochschild_b(eta)) == bimod_bdprime(cotrace_natural(eta))


def test_convolution_examples():
    T = target()
    f = BarCochain(T, 1, {(E12,): even_matrix(1)})
    g = BarCochain(T, 1, {(E21,): even_matrix(2)})
    fg = convolve(f, g)
    assert np.array_equal(fg((E12, E21)), -even_matrix(1).dot(even_matrix(2)))
    one = unit_cochain(T)
    assert convolve(one, f) == f == convolve(f, one)


def test_delta_is_a_derivation():
    T = target()
    f = BarCochain(T, 1, {(E12,): even_matrix(3), (E21,): even_matrix(4)})
    g = BarCochain(T, 0, {(): even_matrix(5), (E11, E22): even_matrix(6)})
    lhs = delta_R(convolve(f, g), M2)
    rhs = convolve(delta_R(f, M2), g) - convolve(f, delta_R(g, M2))
    assert lhs == rhs


def test_delta_intertwines_b_on_one_letter_support():
    T = target()
    gam = BarCochain(T, 1, {((), a, ()): even_matrix(10 + a) for a in range(4)}, bimodule=True)
    assert delta_intertwines_b(gam, NCForm.word(M2, (E12, E21)))


def test_partial_product_intertwines_B():
    T = target()
    rho = {a: even_matrix(20 + a) for a in range(4)}
    f = g = cochain_from_map(T, rho)
    rho_unit = cochain_from_map(T, {**rho, UNIT: T.unit})
    assert partial_product_intertwines_B(f, g, rho_unit, NCForm.word(M2, (E11, E12, E21)))
    with pytest.raises(PreconditionViolated):
        partial_product_intertwines_B(f, g, cochain_from_map(T, {**rho, UNIT: 2 * T.unit}), NCForm.word(M2, (E11, E12)))


def test_bar_suite_small():
    checks = suite_bar(dict(DEFAULTS, bar_instances=4))
    assert all(c.status == "pass" for c in checks), [c for c in checks if c.status != "pass"]
