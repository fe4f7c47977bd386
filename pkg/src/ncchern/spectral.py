"""Finite spectral triples, their JLO cocycles and the bivariant Chern character.

A triple is a representation ``rho`` of a finite algebra on C^{p|q} by even
operators together with an odd operator ``D``.  Plain triples carry complex
(or exact) matrices; bimodules over a coefficient algebra B carry
:class:`~ncchern.opforms.OperatorForm` values with B-words of degree zero.

Odd triples are stored doubled: H = K (x) C_1 = C^{k|k}, rho = diag(alpha, alpha)
and D = eps Q, and traced with Tr (x) zeta, zeta(eps) = 1 + i.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

import numpy as np

from .algebra import UNIT, algebra_from_json, algebra_to_json
from .bar import cotrace_natural
from .errors import (
    BadGrading,
    DimensionMismatch,
    GridTooCoarse,
    NotHomomorphism,
    NotIdempotent,
    ParityMismatch,
    PreconditionViolated,
    SchemaError,
)
from .fedosov import XChain
from .forms import NCForm, connes_B, differential_d, hochschild_b, natural_quotient
from .opforms import OperatorForm, _block_parity, exp_sandwich
from .scalars import Gaussian
from .simplex import duhamel_integral, heat_kernel

ZETA = 1 + 1j  # sqrt(2i) on the fixed branch

# Odd trace on B-forms: zeta Tr(y) with no extra sign on odd form degrees.  With
# this choice the chain-map identities carry the sign (-1)^{|tau|}; the
# twisted trace gives the same identities with sign +1.
ODD_TWIST = False


def _is_exact(m):
    return isinstance(m, np.ndarray) and m.dtype == object


def _cplx(m):
    return np.asarray(m, dtype=complex)


def _eye(d, exact):
    if exact:
        out = np.zeros((d, d), dtype=object)
        for k in range(d):
            out[k, k] = 1
        return out
    return np.eye(d, dtype=complex)


def _close(x, y, tol):
    if _is_exact(x) and _is_exact(y):
        return not any(v != 0 for v in (x - y).ravel())
    return np.max(np.abs(_cplx(x) - _cplx(y)), initial=0.0) <= tol


def _is_zero(m):
    return not any(v != 0 for v in np.asarray(m).ravel())


def _supertrace(m, p):
    return sum(m[k, k] for k in range(p)) - sum(m[k, k] for k in range(p, m.shape[0]))


class SpectralTriple:
    """(H = C^{p|q}, rho, D); ``coeff`` is the coefficient algebra B or ``None``."""

    __slots__ = ("algebra", "rho", "D", "p", "q", "parity", "coeff", "coeff_trunc", "odd_data", "_lazy")

    def __init__(self, algebra, rho, D, p, parity="even", coeff=None, coeff_trunc=4, odd_data=None, check=True):
        self.algebra = algebra
        self.coeff = coeff
        self.coeff_trunc = coeff_trunc
        self.parity = parity
        self.odd_data = odd_data
        self._lazy = callable(rho) and not isinstance(rho, dict)
        if coeff is None:
            self.rho = rho if self._lazy else {k: np.asarray(v) for k, v in rho.items()}
            self.D = np.asarray(D)
            d = self.D.shape[0]
        else:
            self.rho = rho if self._lazy else dict(rho)
            self.D = D
            d = D.shape[0]
        self.p, self.q = p, d - p
        if parity not in ("even", "odd"):
            raise ParityMismatch(f"unknown parity {parity!r}")
        if parity == "odd" and self.p != self.q:
            raise DimensionMismatch("odd triples live on C^{k|k}")
        if check:
            self.check()

    @classmethod
    def odd(cls, algebra, alpha, Q, coeff=None, coeff_trunc=4, check=True):
        """Odd triple from (K, alpha, Q): rho = diag(alpha, alpha), D = eps Q.

        With ``coeff`` set, ``alpha`` and ``Q`` are operator forms on K = C^{k|0}.
        """
        if coeff is not None:
            k = Q.shape[0]
            rho = {a: _double_form(m, False) for a, m in alpha.items()}
            D = _double_form(Q, True)
            data = {"alpha": dict(alpha), "Q": Q}
            return cls(algebra, rho, D, k, "odd", coeff, coeff_trunc, data, check)
        Q = np.asarray(Q)
        k = Q.shape[0]
        rho = {a: _double(np.asarray(m), False) for a, m in alpha.items()}
        data = {"alpha": {a: np.asarray(m) for a, m in alpha.items()}, "Q": Q}
        return cls(algebra, rho, _double(Q, True), k, "odd", odd_data=data, check=check)

    # access

    @property
    def dim(self):
        return self.p + self.q

    @property
    def exact(self):
        if self.coeff is None:
            return _is_exact(self.D)
        return self.D.exact

    def identity(self):
        if self.coeff is None:
            return _eye(self.dim, self.exact)
        return OperatorForm.constant(self.coeff, _eye(self.dim, self.exact), self.p, self.coeff_trunc)

    def rho_of(self, a):
        if a == UNIT:
            return self.identity()
        return self.rho(a) if self._lazy else self.rho[a]

    def rho_element(self, elem):
        """rho of an element dict over the unitalization."""
        out = None
        for k, c in elem.items():
            term = self.rho_of(k) * c
            out = term if out is None else out + term
        return out if out is not None else self.identity() * 0

    def commutator(self, a):
        """[D, rho(a)]: rho(a) is even, so the graded and plain commutators agree."""
        r = self.rho_of(a)
        return self.D @ r - r @ self.D

    def D_squared(self):
        return self.D @ self.D

    # validation

    def check(self, tol=1e-10):
        mats = [] if self._lazy else list(self.rho.items())
        if self.coeff is None:
            for a, m in mats:
                if m.shape != self.D.shape:
                    raise DimensionMismatch(f"rho({a}) has shape {m.shape}")
            d_par = _block_parity(self.D, self.p, self.p)
            r_par = [(a, _block_parity(m, self.p, self.p), _is_zero(m)) for a, m in mats]
            d_zero = _is_zero(self.D)
        else:
            if any(len(w) > 1 for w in self.D.terms):
                raise BadGrading("D must have degree-zero coefficients")
            d_par, d_zero = self.D.parity(), not self.D.terms
            r_par = [(a, m.parity(), not m.terms) for a, m in mats]
        if d_par != 1 and not d_zero:
            raise BadGrading("D must be odd")
        for a, par, zero in r_par:
            if par != 0 and not zero:
                raise BadGrading(f"rho({a}) must be even")
        for (i, x), (j, y) in itertools.product(mats, repeat=2):
            lhs = x @ y
            rhs = self.rho_element(dict(self.algebra.mul(i, j))) if self.algebra.mul(i, j) else x * 0
            if not _equal(lhs, rhs, tol):
                raise NotHomomorphism(f"rho({i}) rho({j}) != rho({i}*{j})")
        return self

    # derived triples

    def with_D(self, D, check=False):
        return self._replace(D=D, check=check)

    def _replace(self, **kw):
        args = dict(
            algebra=self.algebra,
            rho=self.rho,
            D=self.D,
            p=self.p,
            parity=self.parity,
            coeff=self.coeff,
            coeff_trunc=self.coeff_trunc,
            odd_data=self.odd_data,
            check=False,
        )
        args.update(kw)
        return SpectralTriple(**args)

    def scaled(self, t):
        """The triple with D replaced by sqrt(t) D (heat time t)."""
        s = np.sqrt(t)
        data = self.odd_data
        if data is not None:
            data = {"alpha": data["alpha"], "Q": _cplx(data["Q"]) * s}
        if self.coeff is None:
            return self._replace(D=_cplx(self.D) * s, odd_data=data)
        return self._replace(D=self.D.to_complex() * s, odd_data=data)

    def conjugated(self, U, Uinv=None):
        """(U rho U^-1, U D U^-1) for an even invertible matrix U."""
        U = np.asarray(U)
        Uinv = np.linalg.inv(_cplx(U)) if Uinv is None else np.asarray(Uinv)
        if self.coeff is None:
            rho = {a: U @ m @ Uinv for a, m in self.rho.items()}
            return self._replace(rho=rho, D=U @ self.D @ Uinv, odd_data=self._odd_conjugate(U, Uinv))
        rho = {a: m.conjugate_by(U, Uinv) for a, m in self.rho.items()}
        return self._replace(rho=rho, D=self.D.conjugate_by(U, Uinv), odd_data=None)

    def _odd_conjugate(self, U, Uinv):
        # (K, alpha, Q) survives only when U = diag(V, V)
        if self.odd_data is None:
            return None
        k = self.p
        V, W = U[:k, :k], Uinv[:k, :k]
        if not (_is_zero(U[k:, k:] - V) and _is_zero(U[:k, k:]) and _is_zero(U[k:, :k])):
            return None
        alpha = {a: V @ m @ W for a, m in self.odd_data["alpha"].items()}
        return {"alpha": alpha, "Q": V @ self.odd_data["Q"] @ W}

    # JSON

    def to_json(self):
        if self.coeff is not None or self._lazy:
            raise SchemaError("only plain triples with explicit rho serialize")
        obj = {
            "p": self.p,
            "q": self.q,
            "parity": self.parity,
            "algebra": algebra_to_json(self.algebra),
            "rho": {self.algebra.label(a): _matrix_to_json(m) for a, m in self.rho.items()},
            "D": _matrix_to_json(self.D),
            "coeff_trunc": None,
        }
        if self.odd_data is not None:
            obj["alpha"] = {self.algebra.label(a): _matrix_to_json(m) for a, m in self.odd_data["alpha"].items()}
            obj["Q"] = _matrix_to_json(self.odd_data["Q"])
        return obj

    @classmethod
    def from_json(cls, obj, algebra=None):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            alg = algebra if algebra is not None else algebra_from_json(obj["algebra"])
            if obj.get("parity", "even") == "odd":
                alpha = {alg.index(k): _matrix_from_json(v) for k, v in obj["alpha"].items()}
                return cls.odd(alg, alpha, _matrix_from_json(obj["Q"]))
            rho = {alg.index(k): _matrix_from_json(v) for k, v in obj["rho"].items()}
            D = _matrix_from_json(obj["D"])
            p = int(obj["p"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed triple description: {exc}") from exc
        return cls(alg, rho, D, p, "even")


def _double(m, off):
    z = np.zeros_like(m)
    if m.dtype == object:
        z[:, :] = 0
    return np.block([[z, m], [m, z]]) if off else np.block([[m, z], [z, m]])


def _double_form(m, off):
    k = m.shape[0]
    return OperatorForm(m.algebra, k, k, {w: _double(x, off) for w, x in m.terms.items()}, m.trunc)


def _equal(x, y, tol):
    if isinstance(x, OperatorForm):
        diff = x - y
        if diff.exact:
            return not diff.terms
        return diff.max_abs() <= tol
    return _close(x, y, tol)


def _matrix_to_json(m):
    m = np.asarray(m)
    if _is_exact(m):
        m = np.array([[complex(Gaussian.coerce(v)) if not isinstance(v, complex) else v for v in row] for row in m])
    m = _cplx(m)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


# JLO cocycles


def _words_of_parity(chain, parity):
    want = 0 if parity == "even" else 1
    for w, c in chain.terms.items():
        if (len(w) - 1) % 2 != want:
            raise ParityMismatch(f"a degree-{len(w) - 1} chain does not pair with an {parity} triple")
        yield w, c


def jlo_even(T, chain):
    """sum over words of Tr_s(rho(a0) int e^{-s0 D^2} [D, rho(a1)] ... e^{-sn D^2})."""
    if T.parity != "even" or T.coeff is not None:
        raise ParityMismatch("jlo_even needs a plain even triple")
    D2 = _cplx(T.D_squared())
    total = 0j
    for w, c in _words_of_parity(chain, "even"):
        val = _cplx(T.rho_of(w[0])) @ duhamel_integral(D2, [_cplx(T.commutator(a)) for a in w[1:]])
        total += complex(c) * _supertrace(val, T.p)
    return total


def jlo_odd(T, chain):
    """-sqrt(2i) sum over words of Tr(alpha(a0) int e^{-s0 Q^2} [Q, alpha(a1)] ... )."""
    if T.parity != "odd" or T.coeff is not None:
        raise ParityMismatch("jlo_odd needs a plain odd triple")
    if T.odd_data is None:
        raise PreconditionViolated("odd triple lost its (K, alpha, Q) description")
    alpha, Q = T.odd_data["alpha"], _cplx(T.odd_data["Q"])
    k = Q.shape[0]

    def al(a):
        return np.eye(k, dtype=complex) if a == UNIT else _cplx(alpha[a])

    Q2 = Q @ Q
    total = 0j
    for w, c in _words_of_parity(chain, "odd"):
        val = al(w[0]) @ duhamel_integral(Q2, [Q @ al(a) - al(a) @ Q for a in w[1:]])
        total += complex(c) * np.trace(val)
    return -ZETA * total


def jlo(T, chain):
    return jlo_even(T, chain) if T.parity == "even" else jlo_odd(T, chain)


# the bivariant Chern character


class _Regular:
    """Degree-zero operator forms over B as matrices on H (x) B~ (left regular representation)."""

    def __init__(self, B, exact):
        self.B = B
        self.exact = exact
        self.keys = [UNIT, *range(B.dim)]
        self.pos = {k: n for n, k in enumerate(self.keys)}
        m = len(self.keys)
        self.L = {}
        for b in self.keys:
            mat = np.zeros((m, m), dtype=object if exact else complex)
            if exact:
                mat[:, :] = 0
            for j in self.keys:
                for k, c in B.mul(b, j):
                    mat[self.pos[k], self.pos[j]] += c
            self.L[b] = mat

    def lift(self, x):
        out = None
        for w, m in x.terms.items():
            if len(w) != 1:
                raise ParityMismatch("only degree-zero operator forms lift")
            term = np.kron(m, self.L[w[0]])
            out = term if out is None else out + term
        if out is None:
            m = len(self.keys)
            out = np.zeros((x.shape[0] * m, x.shape[1] * m), dtype=object if self.exact else complex)
            if self.exact:
                out[:, :] = 0
        return out

    def lower(self, big, like):
        m = len(self.keys)
        d = like.shape[0]
        cols = big.reshape(d, m, d, m)[:, :, :, 0]
        return like._like({(k,): cols[:, self.pos[k], :] for k in self.keys})


class _Mu0:
    """mu_0 on bimodule words (L | a | R), memoized per triple.

    With X_j = [D, rho(a_j)] off the marked slot i and X_i = rho(a_i),

        mu_0 = (-1)^{i-1} (-1)^{n-1} int e^{-s0 D^2} X_1 e^{-s1 D^2} ... X_n e^{-sn D^2}.

    B-valued operators are lifted to H (x) B~ so each integral is one block
    exponential; ``expand=True`` instead expands the B-letter part of D^2
    as a perturbation of its scalar part.
    """

    def __init__(self, T, expand=False):
        self.T = T
        self.memo = {}
        self.expand = expand
        D2 = T.D_squared()
        self.reg = None
        if T.coeff is None:
            self.H0, self.V = D2, None
        elif not expand and not T.coeff.is_graded:
            self.reg = _Regular(T.coeff, T.exact)
            self.H0 = self.reg.lift(D2)
            self.like = D2
        else:
            self.H0 = D2.scalar_part()
            rest = D2.without_scalar_part()
            self.V = rest if rest.terms else None
            if T.exact and _is_zero(self.H0):
                self.H0 = _eye(T.dim, True) * 0
            if not T.exact:
                self.H0 = _cplx(self.H0)
                self.V = self.V.to_complex() if self.V is not None else None

    def __call__(self, left, a, right):
        key = (left, a, right)
        hit = self.memo.get(key)
        if hit is None:
            T = self.T
            factors = [T.commutator(x) for x in left] + [T.rho_of(a)] + [T.commutator(x) for x in right]
            n, i = len(factors), len(left) + 1
            sign = -1 if (n + i) % 2 else 1
            hit = self._integral(factors) * sign
            self.memo[key] = hit
        return hit

    def _integral(self, factors):
        if self.T.coeff is None:
            return duhamel_integral(self.H0, factors)
        if self.reg is not None:
            big = duhamel_integral(self.H0, [self.reg.lift(f) for f in factors])
            return self.reg.lower(big, self.like)
        return exp_sandwich(self.H0, self.V, factors)

    def transgression(self, left, a, right, rho_dot, D_dot):
        """Coefficient of dt in mu_0 along a path with velocities (rho_dot, D_dot).

        D_dot is inserted in every slot k with sign (-1)^k, and rho_dot(a_j)
        replaces [D, rho(a_j)] with sign (-1)^j; passing the marked slot
        costs one more sign.
        """
        T = self.T
        letters = left + (a,) + right
        factors = [T.commutator(x) for x in left] + [T.rho_of(a)] + [T.commutator(x) for x in right]
        n, i = len(factors), len(left) + 1
        base = -1 if (n + i) % 2 else 1
        acc = None
        for k in range(n + 1):
            s = base * (-1) ** (k + (k >= i))
            term = self._integral(factors[:k] + [D_dot] + factors[k:]) * s
            acc = term if acc is None else acc + term
        for j in range(1, n + 1):
            if j == i:
                continue
            s = base * (-1) ** (j + (j > i))
            f = list(factors)
            f[j - 1] = rho_dot(letters[j - 1])
            acc = acc + self._integral(f) * s
        return acc


def _trace(T, m, twist=None):
    twist = ODD_TWIST if twist is None else twist
    if T.coeff is None:
        if T.parity == "even":
            return _supertrace(m, T.p)
        k = T.p
        return ZETA * sum(m[j, k + j] for j in range(k))
    if T.parity == "even":
        return m.supertrace()
    return m.odd_trace(ZETA, twist=twist)


def _project(form):
    """Drop the part along the adjoined unit."""
    return form._like({w: c for w, c in form.terms.items() if w[0] != UNIT or len(w) > 1})


class BivariantChern:
    """chi = (chi_0, chi_1) of a triple, evaluated on forms over its algebra."""

    def __init__(self, T, expand=False):
        self.T = T
        self.mu0 = _Mu0(T, expand)
        self._dD = None if T.coeff is None else T.D.d()

    def _bimodule(self, chain):
        n_bar = max((len(w) for w in chain.terms), default=1)
        return cotrace_natural(chain, n_bar).terms

    def chi0(self, chain):
        T = self.T
        if T.coeff is None:
            total = 0
            for (L, a, R), c in self._bimodule(chain).items():
                total = total + complex(c) * _trace(T, self.mu0(L, a, R))
            return total
        acc = None
        for (L, a, R), c in self._bimodule(chain).items():
            term = self.mu0(L, a, R) * c
            acc = term if acc is None else acc + term
        if acc is None:
            return NCForm.zero(T.coeff, T.coeff_trunc)
        return _project(_trace(T, acc))

    def chi1_form(self, chain):
        """Representative one-form of chi_1 (before the commutator quotient)."""
        T = self.T
        if T.coeff is None:
            return None
        acc = None
        for (L, a, R), c in self._bimodule(chain).items():
            term = self.mu0(L, a, R) @ self._dD
            if R:
                term = term + self.mu0(L, a, R[:-1]) @ T.rho_of(R[-1]).d()
            term = term * c
            acc = term if acc is None else acc + term
        if acc is None:
            return NCForm.zero(T.coeff, T.coeff_trunc)
        return _trace(T, acc).component(1)

    def chi1(self, chain):
        form = self.chi1_form(chain)
        if form is None:
            return 0
        return natural_quotient(form.with_trunc(1))

    def __call__(self, chain):
        return XChain(self.chi0(chain), self.chi1(chain))


def chi_bivariant(T, chain):
    """(chi_0, chi_1) of ``T`` on a form over its algebra."""
    return BivariantChern(T)(chain)


def b_plus_B(chain):
    return hochschild_b(chain) + connes_B(chain)


def _tau_sign(T):
    return 1 if T.parity == "even" else -1


def x_boundary_of(T, pair):
    """Boundary of X(B) on (even, odd representative): (bbar odd, natural d even), signed by (-1)^{|tau|}."""
    even, odd = pair
    s = _tau_sign(T)
    if T.coeff is None:
        return 0, 0
    return hochschild_b(odd.with_trunc(T.coeff_trunc)) * s, s * natural_quotient(
        differential_d(even).with_trunc(1).component(1)
    )


def chain_map_residuals(T, chain):
    """Residuals of chi_0 (b+B) = s bbar chi_1 and chi_1 (b+B) = s natural d chi_0, s = (-1)^{|tau|}."""
    chi = BivariantChern(T)
    bb = b_plus_B(chain)
    if T.coeff is None:
        return chi.chi0(bb), 0
    r0, r1 = x_boundary_of(T, (chi.chi0(chain), chi.chi1_form(chain)))
    return chi.chi0(bb) - r0, natural_quotient(chi.chi1_form(bb).with_trunc(1)) - r1


# homotopies


class TriplePath:
    """A differentiable family t -> T_t on [0, 1] with its velocity.

    ``at(t)`` returns a triple; ``velocity(t)`` returns ``(rho_dot, D_dot)``
    with ``rho_dot`` a function of basis indices.
    """

    def __init__(self, at, velocity):
        self.at = at
        self.velocity = velocity

    @classmethod
    def linear(cls, T, D1):
        """D_t = (1 - t) D + t D1 with rho fixed."""
        D0 = T.D
        dD = D1 - D0

        def at(t):
            return T.with_D(D0 * (1 - t) + D1 * t)

        def velocity(t):
            return (lambda a: T.rho_of(a) * 0), dD

        return cls(at, velocity)

    @classmethod
    def conjugation(cls, T, X, D1=None):
        """rho_t = U rho U^-1 and D_t = U (D + t D1) U^-1 with U = exp(tX), X even."""
        import scipy.linalg

        X = _cplx(X)
        D0 = T.D if T.coeff is not None else _cplx(T.D)
        D1 = D0 * 0 if D1 is None else D1

        def conj(m, U, Ui):
            return m.conjugate_by(U, Ui) if isinstance(m, OperatorForm) else U @ m @ Ui

        def at(t):
            U, Ui = scipy.linalg.expm(t * X), scipy.linalg.expm(-t * X)
            rho = {a: conj(_cplx(m) if T.coeff is None else m, U, Ui) for a, m in T.rho.items()}
            return T._replace(rho=rho, D=conj(D0 + D1 * t, U, Ui), odd_data=None)

        def velocity(t):
            Tt = at(t)
            U, Ui = scipy.linalg.expm(t * X), scipy.linalg.expm(-t * X)
            Xm = X if T.coeff is None else OperatorForm.constant(T.coeff, X, T.p, T.coeff_trunc)

            def rho_dot(a):
                r = Tt.rho_of(a)
                return Xm @ r - r @ Xm

            return rho_dot, Xm @ Tt.D - Tt.D @ Xm + conj(D1, U, Ui)

        return cls(at, velocity)

    @classmethod
    def flattening(cls, T, P):
        """D_t = D - t([D, P] P - P [D, P]); at t = 1 the operator commutes with P."""
        C = T.D @ P - P @ T.D
        V = -(C @ P - P @ C)
        return cls.linear(T, T.D + V)


def chern_simons(path, chain, grid=200):
    """Midpoint-rule integral of the transgression (cs_0, cs_1) over [0, 1] on ``chain``."""
    acc0 = acc1 = None
    for k in range(grid):
        t = (k + 0.5) / grid
        T = path.at(t)
        rho_dot, D_dot = path.velocity(t)
        c0, c1 = _transgression(T, rho_dot, D_dot, chain)
        acc0 = c0 if acc0 is None else acc0 + c0
        acc1 = c1 if acc1 is None else (acc1 + c1 if c1 is not None else None)
    return acc0 * (1 / grid), (acc1 * (1 / grid) if acc1 is not None else None)


def _transgression(T, rho_dot, D_dot, chain):
    mu = _Mu0(T)
    if not chain.terms:
        if T.coeff is None:
            return 0, None
        zero = NCForm.zero(T.coeff, T.coeff_trunc)
        return zero, zero
    n_bar = max(len(w) for w in chain.terms)
    words = cotrace_natural(chain, n_bar).terms.items()
    acc0 = acc1 = None
    for (L, a, R), c in words:
        m = mu.transgression(L, a, R, rho_dot, D_dot) * c
        acc0 = m if acc0 is None else acc0 + m
        if T.coeff is not None:
            g = m @ T.D.d()
            if R:
                g = g + mu.transgression(L, a, R[:-1], rho_dot, D_dot) @ T.rho_of(R[-1]).d() * c
            acc1 = g if acc1 is None else acc1 + g
    if T.coeff is None:
        return _trace(T, acc0), None
    return _project(_trace(T, acc0)), _trace(T, acc1).component(1)


def homotopy_residual(path, chain, grid=200, tol=None):
    """Norm of chi(T_1) - chi(T_0) - (int cs)(b+B) - s d_X(int cs) on ``chain``.

    With ``tol`` set, a residual above it raises :class:`GridTooCoarse`.
    """
    T0, T1 = path.at(0.0), path.at(1.0)
    chi0, chi1 = BivariantChern(T0), BivariantChern(T1)
    cs_bb = chern_simons(path, b_plus_B(chain), grid)
    if T0.coeff is None:
        res = abs(chi1.chi0(chain) - chi0.chi0(chain) - cs_bb[0])
    else:
        cs = chern_simons(path, chain, grid)
        db0, db1 = x_boundary_of(T0, cs)
        r0 = chi1.chi0(chain) - chi0.chi0(chain) - cs_bb[0] - db0
        r1 = natural_quotient(
            (chi1.chi1_form(chain) - chi0.chi1_form(chain) - cs_bb[1]).with_trunc(1).component(1)
        ) - db1
        res = max(r0.max_abs(), max((abs(v) for v in r1.terms.values()), default=0.0))
    if tol is not None and res > tol:
        raise GridTooCoarse(f"homotopy residual {res:.3e} above {tol:.1e} at grid {grid}")
    return res


# idempotents and the index pairing


def _check_idempotent(alg, e, tol=1e-12):
    sq = alg.multiply(e, e)
    keys = set(sq) | set(e)
    if any(abs(complex(sq.get(k, 0) - e.get(k, 0))) > tol for k in keys):
        raise NotIdempotent("e * e != e")


def ch_idempotent(algebra, e, N=4, picture="x_complex"):
    """Chern character of an idempotent e of the unitalization, up to degree N.

    x_complex: e + sum_n (2n)!/(n!)^2 (e - 1/2)(de de)^n
    bB:        e + sum_n (-1)^n (2n)!/n! (e - 1/2)(de de)^n
    """
    from math import factorial

    if picture not in ("x_complex", "bB"):
        raise ValueError(f"unknown picture {picture!r}")
    _check_idempotent(algebra, e)
    shifted = dict(e)
    shifted[UNIT] = shifted.get(UNIT, 0) - Fraction(1, 2)
    de = {k: v for k, v in e.items() if k != UNIT}
    out = NCForm.from_elements(algebra, [e], N)
    n = 1
    while 2 * n <= N:
        if picture == "x_complex":
            c = Fraction(factorial(2 * n), factorial(n) ** 2)
        else:
            c = Fraction((-1) ** n * factorial(2 * n), factorial(n))
        out = out + NCForm.from_elements(algebra, [shifted] + [de] * (2 * n), N) * c
        n += 1
    return out


def index_pairing(e, T, t=1.0, N=4):
    """<ch(e), JLO(T)> at heat time t, after flattening D so that it commutes with rho(e)."""
    if T.parity != "even" or T.coeff is not None:
        raise ParityMismatch("the index pairing needs a plain even triple")
    P = _cplx(T.rho_element(e))
    if np.max(np.abs(P @ P - P)) > 1e-10:
        raise NotIdempotent("rho(e) is not idempotent")
    flat = TriplePath.flattening(T._replace(D=_cplx(T.D)), P).at(1.0)
    chain = ch_idempotent(T.algebra, e, N, "bB")
    return jlo_even(flat.scaled(t), chain)


def fredholm_index(e, T):
    """dim ker(P D+ P) - dim ker(P D- P) on P H, by exact rank computation."""
    import sympy

    if T.parity != "even":
        raise ParityMismatch("the Fredholm index needs an even triple")
    p = T.p
    P = _to_sympy(T.rho_element(e))
    D = _to_sympy(T.D)
    if (P * P - P).applyfunc(sympy.nsimplify) != sympy.zeros(*P.shape):
        raise NotIdempotent("rho(e) is not idempotent")
    Pp, Pm = P[:p, :p], P[p:, p:]
    Dplus, Dminus = D[p:, :p], D[:p, p:]
    ker_plus = Pp.rank() - (Pm * Dplus * Pp).rank()
    ker_minus = Pm.rank() - (Pp * Dminus * Pm).rank()
    return int(ker_plus - ker_minus)


def _to_sympy(m):
    import sympy

    def conv(v):
        if isinstance(v, Gaussian):
            return sympy.Rational(v.re) + sympy.I * sympy.Rational(v.im)
        if isinstance(v, (int, Fraction)):
            return sympy.Rational(v)
        v = complex(v)
        return sympy.nsimplify(v.real, rational=True) + sympy.I * sympy.nsimplify(v.imag, rational=True)

    m = np.asarray(m)
    return sympy.Matrix(m.shape[0], m.shape[1], [conv(v) for v in m.ravel()])


# functoriality


def pushforward_form(phi, form, target):
    """Omega(phi): a0 da1 ... dan -> phi(a0) dphi(a1) ... dphi(an)."""
    out = NCForm.zero(target, form.trunc)
    for w, c in form.terms.items():
        elems = [{UNIT: 1} if a == UNIT else phi[a] for a in w]
        out = out + NCForm.from_elements(target, elems, form.trunc) * c
    return out


def left_compose(phi, T, source):
    """phi . T = (H, rho o phi, D) for an algebra homomorphism phi: source -> T.algebra."""
    target = T.algebra
    for i, j in itertools.product(range(source.dim), repeat=2):
        lhs = target.multiply(phi[i], phi[j])
        rhs = {}
        for k, c in source.mul(i, j):
            for m, v in phi[k].items():
                rhs[m] = rhs.get(m, 0) + c * v
        keys = set(lhs) | set(rhs)
        if any(abs(complex(lhs.get(k, 0) - rhs.get(k, 0))) > 1e-12 for k in keys):
            raise NotHomomorphism(f"phi({i}) phi({j}) != phi({i}*{j})")
    rho = {i: T.rho_element(phi[i]) for i in range(source.dim)}
    return T._replace(algebra=source, rho=rho, odd_data=_compose_odd(phi, T))


def _compose_odd(phi, T):
    if T.odd_data is None:
        return None
    alpha = T.odd_data["alpha"]
    k = T.p
    out = {}
    for i, elem in phi.items():
        acc = np.zeros((k, k), dtype=complex)
        for m, v in elem.items():
            acc = acc + (np.eye(k) if m == UNIT else _cplx(alpha[m])) * complex(v)
        out[i] = acc
    return {"alpha": out, "Q": T.odd_data["Q"]}


# Clifford modules


class CliffordRep:
    """Exact gamma matrices gamma^1..gamma^n on C^{2^k}, k = n // 2.

    Built from Pauli matrices: gamma^{2j-1}, gamma^{2j} carry sigma_1, sigma_2
    in slot j after j - 1 copies of sigma_3; for odd n the last generator is
    sigma_3 (x) ... (x) sigma_3.  For even n the grading is
    (-i)^k gamma^1 ... gamma^n.
    """

    def __init__(self, n):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.k = n // 2
        one = _exact([[1, 0], [0, 1]])
        s1 = _exact([[0, 1], [1, 0]])
        s2 = _exact([[0, Gaussian(0, -1)], [Gaussian(0, 1), 0]])
        s3 = _exact([[1, 0], [0, -1]])
        gammas = []
        for j in range(self.k):
            for s in (s1, s2):
                gammas.append(_kron_all([s3] * j + [s] + [one] * (self.k - j - 1)))
        if n % 2:
            gammas.append(_kron_all([s3] * self.k) if self.k else _exact([[1]]))
        self.gammas = gammas
        self.dim = 2**self.k

    @property
    def grading(self):
        if self.n % 2:
            raise ParityMismatch("odd Clifford algebras have no grading operator here")
        out = _eye_exact(self.dim)
        for g in self.gammas:
            out = out.dot(g)
        return out * (Gaussian(0, -1) ** self.k)

    def supertrace(self, m):
        g = self.grading
        return _simplify(sum(v for v in np.diag(g.dot(m))))

    def product(self, indices):
        out = _eye_exact(self.dim)
        for i in indices:
            out = out.dot(self.gammas[i])
        return out


def _exact(rows):
    return np.array([[Gaussian.coerce(v) if not isinstance(v, Gaussian) else v for v in r] for r in rows], dtype=object)


def _eye_exact(d):
    out = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            out[i, j] = Gaussian(1 if i == j else 0)
    return out


def _kron_all(mats):
    out = _exact([[1]])
    for m in mats:
        out = np.kron(out, m)
    return out


def _simplify(v):
    from .scalars import simplify

    return simplify(Gaussian.coerce(v))


__all__ = [
    "SpectralTriple",
    "TriplePath",
    "BivariantChern",
    "CliffordRep",
    "ZETA",
    "heat_kernel",
    "duhamel_integral",
    "jlo",
    "jlo_even",
    "jlo_odd",
    "chi_bivariant",
    "chain_map_residuals",
    "x_boundary_of",
    "b_plus_B",
    "chern_simons",
    "homotopy_residual",
    "ch_idempotent",
    "index_pairing",
    "fredholm_index",
    "pushforward_form",
    "left_compose",
]
