"""Bundled spectral triples, random chains and index fixtures.

Everything takes an explicit ``numpy.random.Generator`` so runs reproduce
from a seed.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .algebra import UNIT, complex_numbers, matrix_algebra, nilpotent_polynomials
from .forms import NCForm
from .opforms import OperatorForm
from .spectral import SpectralTriple


def matrix_units(n=2):
    """E_ij as complex matrices, keyed by the basis index n*i + j of M_n."""
    out = {}
    for i in range(n):
        for j in range(n):
            m = np.zeros((n, n), complex)
            m[i, j] = 1
            out[n * i + j] = m
    return out


def _cgauss(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_chain(algebra, degrees, rng, trunc=6, nterms=3):
    """Complex-coefficient form with ``nterms`` random words of the given degrees."""
    terms = {}
    for _ in range(nterms):
        d = int(rng.choice(degrees))
        a0 = int(rng.integers(-1, algebra.dim))
        w = (UNIT if a0 < 0 else a0,) + tuple(int(x) for x in rng.integers(0, algebra.dim, size=d))
        terms[w] = terms.get(w, 0) + complex(rng.normal(), rng.normal())
    return NCForm(algebra, terms, trunc)


def random_exact_chain(algebra, degrees, rng, trunc=6, nterms=3):
    """Like :func:`random_chain` with small rational coefficients."""
    terms = {}
    for _ in range(nterms):
        d = int(rng.choice(degrees))
        a0 = int(rng.integers(-1, algebra.dim))
        w = (UNIT if a0 < 0 else a0,) + tuple(int(x) for x in rng.integers(0, algebra.dim, size=d))
        terms[w] = terms.get(w, 0) + Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    return NCForm(algebra, terms, trunc)


# plain triples


def plain_even(rng, copies=1):
    """M_2 acting on C^2 (x) C^{copies|copies}; even part first, D off-diagonal."""
    A = matrix_algebra(2)
    h = 2 * copies
    rho = {}
    for k, m in matrix_units().items():
        blk = np.kron(np.eye(copies), m)
        rho[k] = np.block([[blk, np.zeros((h, h))], [np.zeros((h, h)), blk]])
    X = _cgauss(rng, (h, h))
    D = np.zeros((2 * h, 2 * h), complex)
    D[:h, h:] = X
    D[h:, :h] = X.conj().T
    return SpectralTriple(A, rho, D, h)


def plain_odd(rng, copies=1):
    """M_2 acting on K = C^2 (x) C^copies with a random self-adjoint Q."""
    A = matrix_algebra(2)
    alpha = {k: np.kron(np.eye(copies), m) for k, m in matrix_units().items()}
    X = _cgauss(rng, (2 * copies, 2 * copies))
    return SpectralTriple.odd(A, alpha, X + X.conj().T)


def random_plain(rng, parity, max_dim=8):
    """Plain triple over M_2 of total dimension at most ``max_dim``."""
    copies = int(rng.integers(1, max_dim // 4 + 1))
    return plain_even(rng, copies) if parity == "even" else plain_odd(rng, copies)


# triples with algebra coefficients


def _op(B, coeffs, p, trunc=4):
    return OperatorForm.from_coefficients(B, coeffs, p, trunc)


def bivariant_nil(rng):
    """Plain even M_2 triple conjugated by 1 + xK over B = C[x]/x^3, plus D1 x."""
    T0 = plain_even(rng)
    B = nilpotent_polynomials(3)
    K = np.zeros((4, 4), complex)
    K[:2, :2] = rng.normal(size=(2, 2))
    K[2:, 2:] = rng.normal(size=(2, 2))
    U = _op(B, {UNIT: np.eye(4), 0: K}, 2)
    Ui = _op(B, {UNIT: np.eye(4), 0: -K, 1: K @ K}, 2)
    rho = {a: U @ _op(B, {UNIT: m}, 2) @ Ui for a, m in T0.rho.items()}
    D1 = np.zeros((4, 4), complex)
    D1[:2, 2:] = rng.normal(size=(2, 2))
    D1[2:, :2] = rng.normal(size=(2, 2))
    D = _op(B, {UNIT: T0.D, 0: D1}, 2)
    return SpectralTriple(T0.algebra, rho, D, 2, coeff=B)


def bivariant_m2(rng):
    """M_2-M_2 bimodule on C^{3|3}: rows 1, 2 (and 4, 5) carry E_ij (x) 1, row 0 carries E_00 (x) E_ij."""
    A = B = matrix_algebra(2)
    rho = {}
    for k, m in matrix_units().items():
        R = np.zeros((6, 6), complex)
        R[1:3, 1:3] = m
        R[4:6, 4:6] = m
        P = np.zeros((6, 6), complex)
        P[0, 0] = 1
        rho[k] = OperatorForm(B, 3, 3, {(UNIT,): R, (k,): P}, 4)
    D = np.zeros((6, 6), complex)
    D[:3, 3:] = _cgauss(rng, (3, 3))
    D[3:, :3] = rng.normal(size=(3, 3))
    return SpectralTriple(A, rho, OperatorForm(B, 3, 3, {(UNIT,): D}, 4), 3, coeff=B)


def bivariant_nil_odd(rng):
    A, B = matrix_algebra(2), nilpotent_polynomials(3)

    def op(c):
        return OperatorForm(B, 2, 0, {(w,): m for w, m in c.items()}, 4)

    K = rng.normal(size=(2, 2))
    u = op({UNIT: np.eye(2), 0: K})
    ui = op({UNIT: np.eye(2), 0: -K, 1: K @ K})
    alpha = {k: u @ op({UNIT: m}) @ ui for k, m in matrix_units().items()}
    Q = op({UNIT: _cgauss(rng, (2, 2)), 0: rng.normal(size=(2, 2))})
    return SpectralTriple.odd(A, alpha, Q, coeff=B)


def bivariant_m2_odd(rng):
    A = B = matrix_algebra(2)

    def op(c):
        return OperatorForm(B, 3, 0, c, 4)

    alpha = {}
    for k, m in matrix_units().items():
        R = np.zeros((3, 3), complex)
        R[1:3, 1:3] = m
        P = np.zeros((3, 3), complex)
        P[0, 0] = 1
        alpha[k] = op({(UNIT,): R, (k,): P})
    Q = op({(UNIT,): _cgauss(rng, (3, 3))})
    return SpectralTriple.odd(A, alpha, Q, coeff=B)


BIVARIANT = {
    "nil_even": bivariant_nil,
    "m2_even": bivariant_m2,
    "nil_odd": bivariant_nil_odd,
    "m2_odd": bivariant_m2_odd,
}


# index fixtures


def _scalar_triple(d_plus, p, q):
    C = complex_numbers()
    D = np.zeros((p + q, p + q), complex)
    Dp = np.asarray(d_plus, complex)
    D[p:, :p] = Dp
    D[:p, p:] = Dp.conj().T
    return SpectralTriple(C, {0: np.eye(p + q, dtype=complex)}, D, p)


def index_fixtures(rng=None):
    """(name, e, triple, index) with the index read off from kernel dimensions."""
    rng = rng if rng is not None else np.random.default_rng(0)
    out = [
        ("C, 1|1, D+ invertible", {0: 1}, _scalar_triple([[1]], 1, 1), 0),
        ("C, 2|1", {0: 1}, _scalar_triple([[1, 0]], 2, 1), 1),
        ("C, 3|1", {0: 1}, _scalar_triple([[1, 0, 0]], 3, 1), 2),
        ("C, 1|2", {0: 1}, _scalar_triple([[1], [0]], 1, 2), -1),
        ("C, 1|3, D = 0", {0: 1}, _scalar_triple([[0], [0], [0]], 1, 3), -2),
    ]
    # M_2 on C^{2|1} through a + 0; D does not commute with rho(e)
    A = matrix_algebra(2)
    rho = {}
    for k, m in matrix_units().items():
        r = np.zeros((3, 3), complex)
        r[:2, :2] = m
        rho[k] = r
    D = np.zeros((3, 3), complex)
    Dp = _cgauss(rng, (1, 2))
    D[2:, :2] = Dp
    D[:2, 2:] = Dp.conj().T
    T = SpectralTriple(A, rho, D, 2)
    out.append(("M_2 on C^{2|1}, e = E11", {0: 1}, T, 1))
    out.append(("M_2 on C^{2|1}, e = 1", {0: 1, 3: 1}, T, 2))
    return out


__all__ = [
    "BIVARIANT",
    "bivariant_m2",
    "bivariant_m2_odd",
    "bivariant_nil",
    "bivariant_nil_odd",
    "index_fixtures",
    "matrix_units",
    "plain_even",
    "plain_odd",
    "random_chain",
    "random_exact_chain",
    "random_plain",
]
