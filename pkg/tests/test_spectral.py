import itertools
import math

import numpy as np
import pytest
import scipy.linalg

from ncchern.algebra import UNIT, complex_numbers, matrix_algebra
from ncchern.errors import NegativeTime, NotHomomorphism, ParityMismatch
from ncchern.fixtures import (
    BIVARIANT,
    bivariant_m2,
    index_fixtures,
    plain_even,
    plain_odd,
    random_chain,
)
from ncchern.forms import NCForm, natural_quotient
from ncchern.scalars import Gaussian
from ncchern.simplex import duhamel_integral, heat_kernel, simplex_monte_carlo
from ncchern.spectral import (
    BivariantChern,
    CliffordRep,
    SpectralTriple,
    TriplePath,
    ch_idempotent,
    chain_map_residuals,
    chern_simons,
    fredholm_index,
    homotopy_residual,
    index_pairing,
    jlo,
    jlo_odd,
    left_compose,
    pushforward_form,
)

M2 = matrix_algebra(2)
C = complex_numbers()


def hermitian(rng, d):
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return X + X.conj().T


# heat kernels and simplex integrals


def test_heat_kernel_examples():
    rng = np.random.default_rng(0)
    D = hermitian(rng, 4)
    assert np.allclose(heat_kernel(D, 0.0), np.eye(4))
    off = np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.allclose(heat_kernel(off, 0.7), math.exp(-0.7) * np.eye(2))
    w, v = np.linalg.eigh(D @ D)
    eig = v @ np.diag(np.exp(-w)) @ v.conj().T
    assert np.max(np.abs(heat_kernel(D, 1.0) - eig)) < 1e-12
    with pytest.raises(NegativeTime):
        heat_kernel(D, -1.0)


def test_duhamel_degenerate_cases():
    rng = np.random.default_rng(1)
    D2 = hermitian(rng, 3)
    assert np.allclose(duhamel_integral(D2, [], 0.5), scipy.linalg.expm(-0.5 * D2))
    As = [rng.normal(size=(3, 3)) for _ in range(3)]
    t = 2.0
    got = duhamel_integral(np.zeros((3, 3)), As, t)
    assert np.allclose(got, As[0] @ As[1] @ As[2] * t**3 / 6, atol=1e-12)


def test_duhamel_one_factor_divided_differences():
    # int_0^1 e^{-s H} X e^{-(1-s) H} ds in the eigenbasis of H
    rng = np.random.default_rng(2)
    H = hermitian(rng, 3)
    X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    w, v = np.linalg.eigh(H)
    Y = v.conj().T @ X @ v
    Z = np.empty_like(Y)
    for i, j in itertools.product(range(3), repeat=2):
        a, b = w[i], w[j]
        Z[i, j] = Y[i, j] * (math.exp(-a) if abs(a - b) < 1e-14 else (math.exp(-a) - math.exp(-b)) / (b - a))
    assert np.max(np.abs(duhamel_integral(H, [X]) - v @ Z @ v.conj().T)) < 1e-12


def test_duhamel_against_monte_carlo():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(3, 3)) * 0.5
    D2 = X @ X.T
    As = [rng.normal(size=(3, 3)) for _ in range(2)]
    mc = simplex_monte_carlo(D2, As, samples=10**6, seed=4)
    assert np.max(np.abs(duhamel_integral(D2, As) - mc)) < 1e-3


# JLO


def scalar_triple(p, q):
    return SpectralTriple(C, {0: np.eye(p + q, dtype=complex)}, np.zeros((p + q, p + q)), p)


def test_jlo_degree_zero():
    assert jlo(scalar_triple(3, 1), NCForm.unit(C)) == 2
    rng = np.random.default_rng(5)
    T = plain_even(rng)
    a0 = 1
    expect = np.trace(T.rho[a0] @ scipy.linalg.expm(-T.D @ T.D) @ np.diag([1, 1, -1, -1]))
    assert abs(jlo(T, NCForm.word(M2, (a0,))) - expect) < 1e-12


def test_jlo_odd_with_zero_q():
    # every factor [Q, alpha(a)] vanishes at Q = 0
    units = {k: m.astype(complex) for k, m in enumerate(np.eye(4).reshape(4, 2, 2))}
    T = SpectralTriple.odd(M2, units, np.zeros((2, 2)))
    assert jlo_odd(T, NCForm.word(M2, (1, 2))) == 0
    assert jlo_odd(T, NCForm.word(M2, (1, 2, 1, 2))) == 0


def test_jlo_odd_degree_one_by_divided_differences():
    rng = np.random.default_rng(6)
    T = plain_odd(rng)
    alpha, Q = T.odd_data["alpha"], T.odd_data["Q"]
    w, v = np.linalg.eigh(Q @ Q)
    X = v.conj().T @ (Q @ alpha[2] - alpha[2] @ Q) @ v
    for i, j in itertools.product(range(2), repeat=2):
        a, b = w[i], w[j]
        X[i, j] *= math.exp(-a) if abs(a - b) < 1e-14 else (math.exp(-a) - math.exp(-b)) / (b - a)
    expect = -(1 + 1j) * np.trace(alpha[1] @ v @ X @ v.conj().T)
    assert abs(jlo(T, NCForm.word(M2, (1, 2))) - expect) < 1e-12


def test_parity_mismatch():
    T = plain_even(np.random.default_rng(7))
    with pytest.raises(ParityMismatch):
        jlo(T, NCForm.word(M2, (1, 2)))


@pytest.mark.parametrize("parity,degs", [("even", [0, 2, 4]), ("odd", [1, 3])])
def test_bivariant_chi0_of_plain_triple_is_jlo(parity, degs):
    rng = np.random.default_rng(8)
    T = plain_even(rng) if parity == "even" else plain_odd(rng)
    c = random_chain(M2, degs, rng)
    assert abs(BivariantChern(T).chi0(c) - jlo(T, c)) < 1e-12


@pytest.mark.parametrize("parity,degs", [("even", [1, 3]), ("odd", [0, 2])])
def test_jlo_cocycle(parity, degs):
    from ncchern.spectral import b_plus_B

    rng = np.random.default_rng(9)
    for _ in range(5):
        T = plain_even(rng, 2) if parity == "even" else plain_odd(rng, 2)
        assert abs(jlo(T, b_plus_B(random_chain(M2, degs, rng)))) < 1e-9


# bivariant character


def test_chi_with_zero_dirac():
    T = bivariant_m2(np.random.default_rng(10))
    T = T.with_D(T.D * 0)
    chi = BivariantChern(T)
    a, a0, a1 = 1, 1, 2
    assert chi.chi0(NCForm.word(M2, (a,))) == T.rho[a].supertrace()._like(
        {w: c for w, c in T.rho[a].supertrace().terms.items() if w != (UNIT,)}
    )
    expect = (T.rho[a0] @ T.rho[a1].d()).supertrace().component(1)
    assert chi.chi1(NCForm.word(M2, (a0, a1))) == natural_quotient(expect.with_trunc(1))


@pytest.mark.parametrize("name", sorted(BIVARIANT))
def test_chain_map(name):
    rng = np.random.default_rng(11)
    T = BIVARIANT[name](rng)
    c = random_chain(M2, [0, 1, 2, 3], rng, nterms=3)
    r0, r1 = chain_map_residuals(T, c)
    assert r0.max_abs() < 1e-9
    assert max((abs(v) for v in r1.terms.values()), default=0.0) < 1e-9


def test_constant_path_transgression_vanishes():
    T = plain_even(np.random.default_rng(12))
    path = TriplePath.linear(T, T.D)
    cs0, _ = chern_simons(path, NCForm.word(M2, (1, 2)), grid=4)
    assert abs(cs0) == 0


def test_linear_path_homotopy():
    rng = np.random.default_rng(13)
    T = plain_even(rng)
    D1 = np.zeros((4, 4), complex)
    D1[:2, 2:] = rng.normal(size=(2, 2))
    D1[2:, :2] = D1[:2, 2:].conj().T
    res = homotopy_residual(TriplePath.linear(T, D1), random_chain(M2, [1], rng, nterms=2), grid=200)
    assert res < 1e-6


# idempotents and the index


def test_ch_idempotent_low_degree():
    ch = ch_idempotent(C, {0: 1}, 2)
    assert ch == NCForm(C, {(0,): 1, (0, 0, 0): 2, (UNIT, 0, 0): -1}, 2)
    e = {0: 1}
    assert not (ch_idempotent(C, e, 4, "bB") - ch_idempotent(C, e, 4, "bB"))


def test_ch_idempotent_rank_one_projector():
    e = {0: 1}
    ch = ch_idempotent(M2, e, 4, "bB")
    shifted = {0: 1, UNIT: -0.5}
    from fractions import Fraction

    shifted[UNIT] = -Fraction(1, 2)
    expect = NCForm.from_elements(M2, [shifted, e, e], 4) * -2
    assert ch.component(2) == expect


def test_ch_idempotent_is_a_cycle():
    from ncchern.spectral import b_plus_B

    ch = ch_idempotent(M2, {0: 1}, 6, "bB")
    assert b_plus_B(ch).degrees in ([], [7])


@pytest.mark.parametrize("fixture", index_fixtures(np.random.default_rng(0)), ids=lambda f: f[0])
def test_index_pairing_fixtures(fixture):
    name, e, T, index = fixture
    assert fredholm_index(e, T) == index
    for t in (0.5, 1.0, 2.0):
        assert abs(index_pairing(e, T, t) - index) < 1e-9


def test_unflattened_pairing_converges_to_the_index():
    name, e, T, index = index_fixtures(np.random.default_rng(0))[-2]
    errs = [abs(jlo(T, ch_idempotent(M2, e, N, "bB")) - index) for N in (2, 6, 12)]
    assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-6


# functoriality


def test_left_compose_identity_and_inclusion():
    rng = np.random.default_rng(14)
    T = plain_even(rng)
    ident = {k: {k: 1} for k in range(4)}
    same = left_compose(ident, T, M2)
    assert all(np.allclose(same.rho[k], T.rho[k]) for k in range(4))
    incl = left_compose({0: {0: 1, 3: 1}}, T, C)
    assert np.allclose(incl.rho[0], np.eye(4))
    with pytest.raises(NotHomomorphism):
        left_compose({0: {1: 1}}, T, C)


def test_left_compose_functoriality():
    rng = np.random.default_rng(15)
    # M2 -> M2 by conjugation with a permutation
    phi = {0: {3: 1}, 1: {2: 1}, 2: {1: 1}, 3: {0: 1}}
    for T in (plain_even(rng), plain_odd(rng)):
        c = random_chain(M2, [0, 2] if T.parity == "even" else [1, 3], rng)
        lhs = jlo(left_compose(phi, T, M2), c)
        rhs = jlo(T, pushforward_form(phi, c, M2))
        assert abs(lhs - rhs) < 1e-9


# Clifford modules


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_clifford_relations(n):
    cl = CliffordRep(n)
    one = cl.product([])
    for i, j in itertools.product(range(n), repeat=2):
        anti = cl.gammas[i].dot(cl.gammas[j]) + cl.gammas[j].dot(cl.gammas[i])
        want = 2 * one if i == j else 0 * one
        assert all(x == y for x, y in zip(anti.ravel(), want.ravel()))


@pytest.mark.parametrize("n", [2, 4])
def test_clifford_supertraces(n):
    cl = CliffordRep(n)
    k = n // 2
    assert cl.supertrace(cl.product(range(n))) == Gaussian(0, 2) ** k
    for m in range(n):
        for idx in itertools.combinations(range(n), m):
            assert cl.supertrace(cl.product(idx)) == 0
