"""The tensor algebra as even forms with the Fedosov product.

Even forms with ``x . y = xy - dx dy`` model the tensor algebra; its
X-complex is realized on all forms, even part in degree 0 and odd part in
degree 1, with the boundary maps written out in terms of b, d and kappa.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import UNIT, complex_numbers
from .errors import AlgebraMismatch, ModeError, ParityMismatch, TruncationOverflow
from .forms import NCForm, differential_d, form_product, hochschild_b, karoubi_kappa
from .scalars import scalar_text
from .opforms import ordered_integral, _word_support


class TensorElem(NCForm):
    """Even form read as an element of the tensor algebra."""

    __slots__ = ()

    def __init__(self, algebra, terms=None, trunc=6, truncated=False):
        super().__init__(algebra, terms, trunc, truncated)
        if any((len(w) - 1) % 2 for w in self.terms):
            raise ParityMismatch("tensor algebra elements are even forms")

    @classmethod
    def of(cls, form):
        return cls(form.algebra, form.terms, form.trunc, form.truncated)

    def tensor_text(self):
        """Print in tensor words: da1 da2 is the curvature w(a1, a2) = a1 a2 - a1 (x) a2."""
        if not self.terms:
            return "0"
        lab = self.algebra.label
        parts = []
        for w, c in sorted(self.terms.items()):
            pieces = [] if w[0] == UNIT and len(w) > 1 else [lab(w[0])]
            for k in range(1, len(w), 2):
                pieces.append(f"w({lab(w[k])},{lab(w[k + 1])})")
            parts.append(f"{scalar_text(c)}*" + " ⊗ ".join(pieces))
        return " + ".join(parts)


@dataclass(frozen=True)
class XChain:
    """Element of the X-complex of the tensor algebra: even forms plus odd forms."""

    even: NCForm
    odd: NCForm

    def __add__(self, other):
        return XChain(self.even + other.even, self.odd + other.odd)

    def __sub__(self, other):
        return XChain(self.even - other.even, self.odd - other.odd)

    def is_zero(self):
        return not self.even and not self.odd


def fedosov_product(x, y):
    if x.algebra != y.algebra:
        raise AlgebraMismatch("tensor elements over different algebras")
    out = form_product(x, y) - form_product(differential_d(x), differential_d(y))
    return TensorElem.of(out)


def mult_map(x):
    """Degree-zero component, as an element dict of the unitalization."""
    return {w[0]: c for w, c in x.terms.items() if len(w) == 1}


def _kappa_power(form, k):
    for _ in range(k):
        form = karoubi_kappa(form)
    return form


def _overflow(form, raise_by, strict):
    top = max(form.degrees, default=-1)
    if strict and top + raise_by > form.trunc:
        raise TruncationOverflow(f"degree {top + raise_by} exceeds cutoff {form.trunc}")


def x_boundary_d(x, strict=False):
    """Even-to-odd boundary: sum_{i<=2n} kappa^i d - sum_{i<n} kappa^{2i} b on degree 2n."""
    _overflow(x, 1, strict)
    out = NCForm.zero(x.algebra, x.trunc)
    for deg in x.degrees:
        if deg % 2:
            raise ParityMismatch("x_boundary_d expects even forms")
        n = deg // 2
        comp = x.component(deg)
        dx = differential_d(comp)
        acc = dx
        for _ in range(2 * n):
            dx = karoubi_kappa(dx)
            acc = acc + dx
        bx = hochschild_b(comp)
        for _ in range(n):
            acc = acc - bx
            bx = _kappa_power(bx, 2)
        out = out + acc
    return out


def x_boundary_b(xi, strict=False):
    """Odd-to-even boundary: b - (1 + kappa) d."""
    _overflow(xi, 1, strict)
    if any(deg % 2 == 0 for deg in xi.degrees):
        raise ParityMismatch("x_boundary_b expects odd forms")
    dxi = differential_d(xi)
    return TensorElem.of(hochschild_b(xi) - dxi - karoubi_kappa(dxi))


def x_differential(chain, strict=False):
    return XChain(x_boundary_b(chain.odd, strict), x_boundary_d(chain.even, strict))


def idempotent_e_hat(N, algebra=None):
    """e + sum_n (2n)!/(n!)^2 (e - 1/2)(de de)^n, truncated at degree N."""
    alg = algebra if algebra is not None else complex_numbers()
    e = 0
    terms = {(e,): 1}
    n = 1
    while 2 * n <= N:
        c = math.factorial(2 * n) // math.factorial(n) ** 2
        letters = (e,) * (2 * n)
        terms[(e,) + letters] = c
        terms[(UNIT,) + letters] = -Fraction(c, 2)
        n += 1
    return TensorElem(alg, terms, N)


# lifting representations


def lift_rho_star(rho, x):
    """Operator form rho(a0) d rho(a1) ... d rho(a_2n), summed over the words of ``x``.

    ``rho`` maps basis indices of the algebra of ``x`` to even operator forms;
    it acts on even vector forms through :func:`~ncchern.opforms.fedosov_act`.
    """
    some = next(iter(rho.values()))
    ident = some._like({(UNIT,): np.eye(some.shape[0], dtype=some.scalar_part().dtype if some.exact else complex)})
    out = some.zero_like()
    for w, c in x.terms.items():
        term = ident if w[0] == UNIT else rho[w[0]]
        for a in w[1:]:
            term = term @ rho[a].d()
        out = out + term * c
    return out


# Fedosov exponential

ExpScaled = namedtuple("ExpScaled", "exponent body")


def _scalar_value(m):
    d = m.shape[0]
    c = m[0, 0]
    for i in range(d):
        for j in range(d):
            if m[i, j] != (c if i == j else 0):
                return None
    return c


def fedosov_exp(H, mode="float", max_terms=64):
    """Fedosov exponential of an even operator form H = H0 + V.

    Sum over n of (-1)^n int e^{s0 H} dH d(e^{s1 H}) dH ... d(e^{sn H}),
    each e^{sH} expanded around the constant part H0.  All pieces combine into
    ordered integrals over one simplex with heat factors e^{u H0}.

    In exact mode H0 must be scalar, c * Id; the result is returned as
    ``ExpScaled(c, F)`` meaning e^c F.
    """
    H0 = H.scalar_part()
    V = H.without_scalar_part()
    dV = V.d()
    if mode == "exact":
        c = _scalar_value(H0)
        if c is None:
            raise ModeError("exact Fedosov exponential needs a scalar constant part")
        base = np.zeros(H0.shape, dtype=object)
        H0 = base
    else:
        H0 = np.asarray(H0, dtype=complex)
        V, dV = V.to_complex(), dV.to_complex()
    minus_h0 = -H0 if mode != "exact" else H0
    alg, trunc = H.algebra, H.trunc
    vwords, dvwords = list(V.terms), list(dV.terms)
    ident = np.eye(H0.shape[0], dtype=object if mode == "exact" else complex)
    total = H._like({(UNIT,): ident if mode == "exact" else _expm(H0)})
    # regular pattern V* (dV V* dV V*)*; state 0 accepts, 1 waits for the second dV
    stack = [((), 0, 0, {(UNIT,)})]
    while stack:
        seq, state, n, support = stack.pop()
        if len(seq) > max_terms:
            raise TruncationOverflow("Fedosov exponential did not terminate")
        if seq and state == 0:
            val = ordered_integral(minus_h0, list(seq))
            total = total + (val if n % 2 == 0 else -val)
        if vwords:
            sup = _word_support(alg, support, vwords, trunc)
            if sup:
                stack.append((seq + (V,), state, n, sup))
        if dvwords:
            sup = _word_support(alg, support, dvwords, trunc)
            if sup:
                stack.append((seq + (dV,), 1 - state, n + (state == 0), sup))
    if mode == "exact":
        return ExpScaled(c, total)
    return total


def _expm(m):
    import scipy.linalg

    return scipy.linalg.expm(m)
