"""De Rham forms on R^n with Gaussian coefficients, and the Bott element.

A term is ``c * x^alpha * exp(-m lam |x|^2) * dx_I`` with ``I`` strictly
increasing and ``c`` a :class:`~ncchern.scalars.MonomialSum`.  ``m = 0`` marks
a pure polynomial, which is never integrable.  The symbol ``lam`` stays
symbolic; only the oracle helpers lower it to floats.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, ModeError, NotIntegrable, NotTopDegree, ParityMismatch
from .scalars import SQRT_2I, Gaussian, MonomialSum, scalar_text, simplify
from .spectral import CliffordRep

TWO_I = Gaussian(0, 2)


def _ms(c):
    out = MonomialSum.coerce(c)
    if out is NotImplemented:
        raise ModeError(f"not a symbolic scalar: {c!r}")
    return out


def _sort_sign(idx):
    """Sorted tuple and permutation sign, or (None, 0) on a repeated index."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


def _add(acc, key, c):
    v = acc.get(key)
    v = c if v is None else v + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class GaussianForm:
    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        acc = {}
        for (alpha, m, I), c in (terms or {}).items():
            if len(alpha) != n or any(i < 0 or i >= n for i in I):
                raise DimensionMismatch(f"term {alpha, I} does not live on R^{n}")
            key, sign = _sort_sign(I)
            if sign:
                _add(acc, (tuple(alpha), m, key), _ms(c) * sign)
        self.terms = acc

    # constructors

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, c=1):
        return cls(n, {((0,) * n, 0, ()): c})

    @classmethod
    def gaussian(cls, n, c=1):
        """c * exp(-lam |x|^2)."""
        return cls(n, {((0,) * n, 1, ()): c})

    @classmethod
    def coordinate(cls, n, u):
        return cls(n, {(_unit(n, u), 0, ()): 1})

    @classmethod
    def dx(cls, n, *idx):
        """dx_{i1} ^ ... ^ dx_{ik} in the given order (0-based indices)."""
        return cls(n, {((0,) * n, 0, tuple(idx)): 1})

    # structure

    @property
    def degrees(self):
        return sorted({len(I) for (_, _, I) in self.terms})

    def component(self, k):
        return GaussianForm(self.n, {key: c for key, c in self.terms.items() if len(key[2]) == k})

    @property
    def is_even(self):
        return all(len(I) % 2 == 0 for (_, _, I) in self.terms)

    def _check(self, other):
        if not isinstance(other, GaussianForm):
            raise TypeError("expected a GaussianForm")
        if other.n != self.n:
            raise DimensionMismatch(f"forms on R^{self.n} and R^{other.n}")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for key, c in other.terms.items():
            _add(t, key, c)
        return GaussianForm(self.n, t)

    def __neg__(self):
        return GaussianForm(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, GaussianForm):
            return NotImplemented
        c = _ms(c)
        return GaussianForm(self.n, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, GaussianForm) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "GaussianForm(0)"
        parts = []
        for (alpha, m, I), c in sorted(self.terms.items()):
            s = f"({scalar_text(c)})"
            s += "".join(f"*x{u + 1}^{a}" if a > 1 else f"*x{u + 1}" for u, a in enumerate(alpha) if a)
            if m:
                s += "*exp(-lam x^2)" if m == 1 else f"*exp(-{m} lam x^2)"
            if I:
                s += "*" + "^".join(f"dx{i + 1}" for i in I)
            parts.append(s)
        return "GaussianForm(" + " + ".join(parts) + ")"

    # numeric view for oracles

    def coefficient(self, I, x, lam):
        """Float value of the dx_I coefficient at the point ``x``."""
        x = np.asarray(x, dtype=float)
        r2 = float(x @ x)
        total = 0j
        for (alpha, m, J), c in self.terms.items():
            if J != tuple(I):
                continue
            total += c.lower(lam) * np.prod(x ** np.array(alpha)) * math.exp(-m * lam * r2)
        return total


def _unit(n, u):
    return tuple(1 if i == u else 0 for i in range(n))


def wedge(w1, w2):
    w1._check(w2)
    acc = {}
    for (a1, m1, I1), c1 in w1.terms.items():
        for (a2, m2, I2), c2 in w2.terms.items():
            key, sign = _sort_sign(I1 + I2)
            if sign:
                _add(acc, (tuple(p + q for p, q in zip(a1, a2)), m1 + m2, key), c1 * c2 * sign)
    return GaussianForm(w1.n, acc)


LAM = MonomialSum.monomial(1, 0, 2)


def deRham_d(w):
    n = w.n
    acc = {}
    for (alpha, m, I), c in w.terms.items():
        for u in range(n):
            if u in I:
                continue
            key, sign = _sort_sign((u,) + I)
            if alpha[u]:
                lower_ = tuple(a - (i == u) for i, a in enumerate(alpha))
                _add(acc, (lower_, m, key), c * (alpha[u] * sign))
            if m:
                raise_ = tuple(a + (i == u) for i, a in enumerate(alpha))
                _add(acc, (raise_, m, key), c * LAM * (-2 * m * sign))
    return GaussianForm(n, acc)


def fedosov_T(w1, w2):
    """w1 . w2 = w1 w2 - dw1 dw2 on even forms."""
    w1._check(w2)
    if not (w1.is_even and w2.is_even):
        raise ParityMismatch("the Fedosov product is defined on even forms")
    return wedge(w1, w2) - wedge(deRham_d(w1), deRham_d(w2))


def _double_factorial(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def _moment(a, m):
    """int x^a exp(-m lam x^2) dx over R as a MonomialSum."""
    if a % 2:
        return MonomialSum()
    r = math.isqrt(m)
    if r * r != m:
        raise NotIntegrable(f"exp(-{m} lam x^2) has no exact moment in these scalars")
    c = Fraction(_double_factorial(a - 1), (2 * m) ** (a // 2) * r)
    return MonomialSum.monomial(c, 1, -a - 1)


def integrate_top(w):
    """Integral over R^n, oriented by dx1 ^ ... ^ dxn."""
    top = tuple(range(w.n))
    total = MonomialSum()
    for (alpha, m, I), c in w.terms.items():
        if I != top:
            raise NotTopDegree(f"degree {len(I)} term on R^{w.n}")
        if not m:
            raise NotIntegrable("polynomial term without Gaussian damping")
        value = c
        for a in alpha:
            value = value * _moment(a, m)
        total = total + value
    return total


class NaturalOneForm:
    """Sum of classes natural(x dy) with x, y even Gaussian forms."""

    __slots__ = ("n", "pairs")

    def __init__(self, n, pairs=()):
        self.n = n
        self.pairs = [(x, y) for x, y in pairs if x and y]

    def __add__(self, other):
        return NaturalOneForm(self.n, self.pairs + other.pairs)

    def __mul__(self, c):
        return NaturalOneForm(self.n, [(x * c, y) for x, y in self.pairs])

    __rmul__ = __mul__

    def to_odd_form(self):
        """Image x ^ dy in the odd de Rham forms."""
        out = GaussianForm.zero(self.n)
        for x, y in self.pairs:
            out = out + wedge(x, deRham_d(y))
        return out

    def normal_form(self):
        """Canonical dict for pairs whose y is a coordinate: (x key, u) -> coefficient."""
        acc = {}
        for x, y in self.pairs:
            ((alpha, m, I), cy), = y.terms.items()
            if m or I or sum(alpha) != 1 or cy != 1:
                raise ValueError("normal_form needs y to be a coordinate function")
            u = alpha.index(1)
            for key, c in x.terms.items():
                _add(acc, (key, u), c)
        return acc

    def __repr__(self):
        return "NaturalOneForm(" + " + ".join(f"natural({x!r} 𝐝{y!r})" for x, y in self.pairs) + ")"


# Bott element


def bott_chern(n, method="closed_form"):
    """Chern character of the Bott element on R^n.

    Even n gives a top form, odd n a :class:`NaturalOneForm`.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if method == "closed_form":
        return _bott_closed(n)
    if method == "fedosov_exp":
        return _bott_fedosov(n)
    raise ValueError(f"unknown method {method!r}")


def _half_power_2i(n):
    """(2i)^(n/2) on the fixed branch sqrt(2i) = 1 + i."""
    out = TWO_I ** (n // 2)
    return out * SQRT_2I if n % 2 else out


def _bott_closed(n):
    k = n // 2
    scale = MonomialSum.monomial(_half_power_2i(n), 0, n)
    if n % 2 == 0:
        c = scale * Fraction(math.factorial(n), math.factorial(k))
        return GaussianForm(n, {((0,) * n, 1, tuple(range(n))): c})
    c = scale * Fraction(-math.factorial(2 * k), math.factorial(k))
    pairs = []
    for j in range(n):
        cyc = tuple((j + 1 + t) % n for t in range(n - 1))
        x = GaussianForm(n, {((0,) * n, 1, cyc): c})
        pairs.append((x, GaussianForm.coordinate(n, j)))
    return NaturalOneForm(n, pairs)


# operator forms with polynomial entries

class _OpForm:
    """Sum of M (x) x^alpha lam^(q/2) s^mono dx_I with M exact matrices.

    Products follow (T (x) u)(S (x) v) = T G^|u| S G^|u| (x) uv and
    d(T (x) u) = G T G (x) du for the diagonal grading G.
    """

    __slots__ = ("g", "terms")

    def __init__(self, g, terms=None):
        self.g = g
        self.terms = {k: v for k, v in (terms or {}).items() if _nonzero(v)}

    def _flip(self, M, k):
        if k % 2 == 0:
            return M
        return M * np.outer(self.g, self.g)

    def __add__(self, other):
        t = dict(self.terms)
        for key, M in other.terms.items():
            t[key] = t[key] + M if key in t else M
        return _OpForm(self.g, t)

    def __neg__(self):
        return _OpForm(self.g, {k: -M for k, M in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return _OpForm(self.g, {k: M * c for k, M in self.terms.items()})

    def __matmul__(self, other):
        acc = {}
        for (a1, I1, s1, q1), T in self.terms.items():
            for (a2, I2, s2, q2), S in other.terms.items():
                I, sign = _sort_sign(I1 + I2)
                if not sign:
                    continue
                key = (_vadd(a1, a2), I, _vadd(s1, s2), q1 + q2)
                M = T.dot(self._flip(S, len(I1)))
                M = M if sign > 0 else -M
                acc[key] = acc[key] + M if key in acc else M
        return _OpForm(self.g, acc)

    def d(self):
        acc = {}
        for (alpha, I, s, q), M in self.terms.items():
            for u in range(len(alpha)):
                if not alpha[u] or u in I:
                    continue
                J, sign = _sort_sign((u,) + I)
                key = (tuple(a - (i == u) for i, a in enumerate(alpha)), J, s, q)
                N = self._flip(M, 1) * (alpha[u] * sign)
                acc[key] = acc[key] + N if key in acc else N
        return _OpForm(self.g, acc)

    def times_s(self, i):
        acc = {}
        for (alpha, I, s, q), M in self.terms.items():
            s2 = tuple(e + (j == i) for j, e in enumerate(s))
            acc[(alpha, I, s2, q)] = M
        return _OpForm(self.g, acc)

    def simplex_integral(self):
        """Integrate the s-monomials over the standard simplex."""
        acc = {}
        for (alpha, I, s, q), M in self.terms.items():
            k = len(s) - 1
            w = Fraction(math.prod(math.factorial(e) for e in s), math.factorial(k + sum(s)))
            key = (alpha, I, (), q)
            N = M * w
            acc[key] = acc[key] + N if key in acc else N
        return _OpForm(self.g, acc)

    def with_s(self, length):
        """Reinterpret s-free terms as living on a simplex with ``length`` variables."""
        return _OpForm(self.g, {(a, I, (0,) * length, q): M for (a, I, s, q), M in self.terms.items()})


def _vadd(a, b):
    if not a:
        return b
    if not b:
        return a
    return tuple(x + y for x, y in zip(a, b))


def _nonzero(M):
    return any(v != 0 for v in M.flat)


def _bott_operator(n):
    """Q_lam = sqrt(lam) x_mu gamma^mu; doubled with the odd generator for odd n."""
    cl = CliffordRep(n)
    if n % 2 == 0:
        G = cl.grading
        g = [G[i, i] for i in range(cl.dim)]
        if any(G[i, j] != 0 for i in range(cl.dim) for j in range(cl.dim) if i != j):
            raise AssertionError("spinor grading is not diagonal")
        gens = cl.gammas
    else:
        g = [1] * cl.dim + [-1] * cl.dim
        eps = np.array([[Gaussian(0), Gaussian(1)], [Gaussian(1), Gaussian(0)]], dtype=object)
        gens = [np.kron(eps, gm) for gm in cl.gammas]
    g = [simplify(v) for v in g]
    terms = {(_unit(n, mu), (), (), 1): gm for mu, gm in enumerate(gens)}
    return cl, _OpForm(g, terms)


def _scalar_gaussian_exponent(H0, n, dim):
    """Check H0 = -lam |x|^2 Id."""
    ident = np.eye(dim, dtype=object)
    want = {(tuple(2 * (i == u) for i in range(n)), (), (), 2) for u in range(n)}
    if set(H0.terms) != want:
        raise AssertionError("constant part of the curvature is not -lam |x|^2")
    for M in H0.terms.values():
        if any(M[i, j] != (-1 if i == j else 0) for i in range(dim) for j in range(dim)):
            raise AssertionError("constant part of the curvature is not scalar")
    return ident


def fedosov_exp_bott(n):
    """Duhamel series for exp(-D . D), D = Q_lam, with the Gaussian factored out.

    Returns F with exp(-D . D) = exp(-lam |x|^2) F.  H = H0 + N with
    H0 = -D^2 = -lam |x|^2 and N = -dD dD.  The n-th term of the series is
    (-1)^n int e^{s0 H} dH d(e^{s1 H}) ... dH d(e^{sn H}); every e^{s H0}
    is scalar, so their product over the simplex is e^{H0}, and
    d(e^{s H}) = e^{s H0} (s dH0 E_s + d E_s) with E_s = sum (s N)^j / j!.
    """
    cl, D = _bott_operator(n)
    dim = len(D.g)
    H0 = -(D @ D)
    _scalar_gaussian_exponent(H0, n, dim)
    dD = D.d()
    N = -(dD @ dD)
    dH0 = H0.d()
    dH = dH0 + N.d()
    powers = [_OpForm(D.g, {((0,) * n, (), (), 0): _identity(dim)})]
    while True:
        nxt = powers[-1] @ N
        if not nxt.terms:
            break
        powers.append(nxt)
    total = _OpForm(D.g)
    # dH d(e^{sH}) raises the form degree by at least two
    for k in range(n // 2 + 2):
        L = k + 1

        def E(i):
            out = _OpForm(D.g)
            for j, Pj in enumerate(powers):
                term = Pj.with_s(L).scale(Fraction(1, math.factorial(j)))
                for _ in range(j):
                    term = term.times_s(i)
                out = out + term
            return out

        prod = E(0)
        for i in range(1, L):
            Ei = E(i)
            dE = (dH0.with_s(L) @ Ei).times_s(i) + Ei.d()
            prod = prod @ dH.with_s(L) @ dE
        val = prod.simplex_integral()
        total = total + (val if k % 2 == 0 else -val)
    return cl, D, total


def collapsed_exp_bott(n):
    """exp(-lam |x|^2)-stripped sum_k (-1)^k / k! (dD dD)^k."""
    _, D = _bott_operator(n)
    dD = D.d()
    w = dD @ dD
    term = _OpForm(D.g, {((0,) * n, (), (), 0): _identity(len(D.g))})
    total = term
    k = 0
    while term.terms:
        k += 1
        term = (term @ w).scale(Fraction(-1, k))
        total = total + term
    return total


def _identity(d):
    out = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            out[i, j] = Gaussian(1 if i == j else 0)
    return out


def _bott_fedosov(n):
    cl, D, F = fedosov_exp_bott(n)
    if n % 2 == 0:
        G = cl.grading
        acc = {}
        for (alpha, I, _, q), M in F.terms.items():
            tr = simplify(sum(G.dot(M).diagonal(), Gaussian(0)))
            if tr != 0:
                _add(acc, (alpha, 1, I), MonomialSum.monomial(tr, 0, q))
        return GaussianForm(n, acc)
    # odd: natural tau(F 𝐝D), tau(x + eps y) = sqrt(2i) tr(y), 𝐝 acting like d on D
    h = cl.dim
    dD = {}
    for (alpha, I, s, q), M in D.terms.items():
        dD[alpha.index(1)] = (D._flip(M, 1), q)
    pairs = []
    for (alpha, I, _, q), M in F.terms.items():
        for u, (S, qs) in dD.items():
            P = M.dot(D._flip(S, len(I)))
            tr = simplify(sum(P[:h, h:].diagonal(), Gaussian(0)))
            if tr != 0:
                x = GaussianForm(n, {(alpha, 1, I): MonomialSum.monomial(tr * SQRT_2I, 0, q + qs)})
                pairs.append((x, GaussianForm.coordinate(n, u)))
    return NaturalOneForm(n, pairs)


# Dirac side


def dirac_coefficient(n):
    """(-1)^n [n/2]! / (n! (2 pi i)^(n/2))."""
    c = Fraction((-1) ** n * math.factorial(n // 2), math.factorial(n))
    return MonomialSum.monomial(c, 0, 0) / MonomialSum.monomial(_half_power_2i(n), n, 0)


def fundamental_cocycle(n, chain):
    """Dirac fundamental class on R^n evaluated on a chain.

    Even n reads a :class:`GaussianForm` through int over R^n, odd n a
    :class:`NaturalOneForm` through natural(x dy) -> int x ^ dy.  Chains of the
    other parity pair to zero.
    """
    if isinstance(chain, GaussianForm):
        if chain.n != n:
            raise DimensionMismatch(f"chain on R^{chain.n}, cocycle on R^{n}")
        if n % 2:
            return MonomialSum()
        return dirac_coefficient(n) * integrate_top(chain.component(n))
    if isinstance(chain, NaturalOneForm):
        if chain.n != n:
            raise DimensionMismatch(f"chain on R^{chain.n}, cocycle on R^{n}")
        if n % 2 == 0:
            return MonomialSum()
        return dirac_coefficient(n) * integrate_top(chain.to_odd_form().component(n))
    raise TypeError("expected a GaussianForm or NaturalOneForm")


def pair_bott_dirac(n, method="closed_form"):
    """Pairing of ch(beta_n) with the Dirac class; exactly 1."""
    if not 1 <= n <= 4:
        raise ValueError("exact Clifford data is wired up for 1 <= n <= 4")
    return fundamental_cocycle(n, bott_chern(n, method))


__all__ = [
    "GaussianForm",
    "NaturalOneForm",
    "wedge",
    "deRham_d",
    "fedosov_T",
    "integrate_top",
    "bott_chern",
    "fedosov_exp_bott",
    "collapsed_exp_bott",
    "dirac_coefficient",
    "fundamental_cocycle",
    "pair_bott_dirac",
    "LAM",
]
