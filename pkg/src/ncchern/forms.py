"""Noncommutative differential forms over a finite algebra.

A form is a finite sum of words ``(a0, a1, ..., an)`` standing for
``a0 da1 ... dan``.  ``a0`` runs over the unitalization (``UNIT`` for the
adjoined unit), the remaining letters over basis indices of the algebra.
Every form carries a degree cutoff ``trunc``; operators that would produce
words above it drop them and set ``truncated`` on the result.

Word-level actions are memoized per algebra, so repeated applications of
the operators below are cheap.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .algebra import UNIT
from .errors import AlgebraMismatch, NotDegreeOne, NotHomogeneous
from .exactla import SubspaceReducer
from .scalars import scalar_text, simplify


def _add_into(acc, word, c):
    v = acc.get(word, 0) + c
    if v == 0:
        acc.pop(word, None)
    else:
        acc[word] = v


class NCForm:
    """Truncated element of the DG algebra of noncommutative forms."""

    __slots__ = ("algebra", "trunc", "terms", "truncated")

    def __init__(self, algebra, terms=None, trunc=6, truncated=False):
        self.algebra = algebra
        self.trunc = trunc
        clean = {}
        dropped = False
        for w, c in (terms or {}).items():
            if len(w) - 1 > trunc:
                if c != 0:
                    dropped = True
                continue
            _add_into(clean, tuple(w), c)
        self.terms = {w: simplify(c) for w, c in clean.items()}
        self.truncated = truncated or dropped

    # construction helpers

    @classmethod
    def zero(cls, algebra, trunc=6):
        return cls(algebra, {}, trunc)

    @classmethod
    def word(cls, algebra, word, coeff=1, trunc=6):
        return cls(algebra, {tuple(word): coeff}, trunc)

    @classmethod
    def unit(cls, algebra, trunc=6):
        return cls(algebra, {(UNIT,): 1}, trunc)

    @classmethod
    def from_elements(cls, algebra, elements, trunc=6):
        """Multilinear expansion of ``x0 dx1 ... dxn`` for element dicts ``xi``."""
        acc = {}
        for combo in itertools.product(*(x.items() for x in elements)):
            w = tuple(k for k, _ in combo)
            c = 1
            for _, v in combo:
                c = c * v
            if any(k == UNIT for k in w[1:]):
                continue
            _add_into(acc, w, c)
        return cls(algebra, acc, trunc)

    def _like(self, terms, truncated=False):
        return NCForm(self.algebra, terms, self.trunc, self.truncated or truncated)

    # linear structure

    def _check(self, other):
        if not isinstance(other, NCForm):
            raise TypeError("expected an NCForm")
        if other.algebra != self.algebra:
            raise AlgebraMismatch("forms live over different algebras")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        self._check(other)
        acc = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(acc, w, c)
        return NCForm(self.algebra, acc, min(self.trunc, other.trunc), self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return self._like({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NCForm):
            return form_product(self, other)
        return self._like({w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        return self._like({w: other * c for w, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        if not isinstance(other, NCForm):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # gradings

    @property
    def degrees(self):
        return sorted({len(w) - 1 for w in self.terms})

    def component(self, n):
        return self._like({w: c for w, c in self.terms.items() if len(w) - 1 == n})

    def even(self):
        return self._like({w: c for w, c in self.terms.items() if (len(w) - 1) % 2 == 0})

    def odd(self):
        return self._like({w: c for w, c in self.terms.items() if (len(w) - 1) % 2 == 1})

    def homogeneous_degree(self):
        ds = self.degrees
        if len(ds) > 1:
            raise NotHomogeneous(f"form has components in degrees {ds}")
        return ds[0] if ds else None

    def with_trunc(self, trunc):
        return NCForm(self.algebra, self.terms, trunc, self.truncated)

    def map_coefficients(self, f):
        return self._like({w: f(c) for w, c in self.terms.items()})

    def max_abs(self):
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    # text notation

    def to_text(self):
        if not self.terms:
            return "0"
        lab = self.algebra.label
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), repr(t[0]))):
            body = " ".join(([] if w[0] == UNIT and len(w) > 1 else [lab(w[0])]) + [f"d[{lab(a)}]" for a in w[1:]])
            parts.append(f"{scalar_text(c)}*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"NCForm({self.to_text()})"


_TERM = re.compile(r"^\s*(?:(?P<coef>[^*]+)\*)?\s*(?P<body>.*)$")


def parse_form(algebra, text, trunc=6):
    """Read ``"2*a0 d[a1] d[a2] + d[a3]"`` style notation (terms separated by ' + ')."""
    from .scalars import exact

    acc = {}
    for chunk in text.split(" + "):
        chunk = chunk.strip()
        if not chunk or chunk == "0":
            continue
        m = _TERM.match(chunk)
        coef = exact(m.group("coef").strip()) if m.group("coef") else 1
        tokens = m.group("body").split()
        letters = []
        a0 = UNIT
        for k, tok in enumerate(tokens):
            if tok.startswith("d[") and tok.endswith("]"):
                letters.append(algebra.index(tok[2:-1]))
            elif k == 0:
                a0 = algebra.index(tok)
            else:
                raise ValueError(f"bad token {tok!r}")
        _add_into(acc, (a0, *letters), coef)
    return NCForm(algebra, acc, trunc)


# word-level primitives


def _memo(algebra, name):
    return algebra.cache.setdefault(name, {})


def _mul_words(algebra, i, j):
    return algebra.mul(i, j)


def _right_mult(algebra, word, b):
    """``word * b`` for a basis letter ``b`` (no UNIT), as a dict of words."""
    memo = _memo(algebra, "rmul")
    key = (word, b)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = {}
    if len(word) == 1:
        for k, c in algebra.mul(word[0], b):
            _add_into(out, (k,), c)
    else:
        head, an = word[:-1], word[-1]
        # w' dan . b = w' d(an b) - (w' an) db
        for k, c in algebra.mul(an, b):
            _add_into(out, head + (k,), c)
        for u, c in _right_mult(algebra, head, an).items():
            _add_into(out, u + (b,), -c)
    memo[key] = out
    return out


def _left_mult(algebra, a, word):
    """``a * word`` for a letter ``a`` (UNIT allowed)."""
    out = {}
    for k, c in algebra.mul(a, word[0]):
        _add_into(out, (k,) + word[1:], c)
    return out


def word_product(algebra, w1, w2):
    """Product of two words in the DG algebra (Leibniz rule)."""
    if w2[0] == UNIT:
        return {w1 + w2[1:]: 1}
    return {u + w2[1:]: c for u, c in _right_mult(algebra, w1, w2[0]).items()}


def word_d(algebra, w):
    if w[0] == UNIT:
        return {}
    return {(UNIT,) + w: 1}


def word_b(algebra, w):
    """Hochschild boundary of ``a0 da1 ... dan``."""
    memo = _memo(algebra, "b")
    hit = memo.get(w)
    if hit is not None:
        return hit
    n = len(w) - 1
    out = {}
    if n >= 1:
        a = w
        for k, c in algebra.mul(a[0], a[1]):
            _add_into(out, (k,) + a[2:], c)
        for i in range(1, n):
            s = -1 if i % 2 else 1
            for k, c in algebra.mul(a[i], a[i + 1]):
                _add_into(out, a[:i] + (k,) + a[i + 2:], s * c)
        s = -1 if n % 2 else 1
        for k, c in algebra.mul(a[n], a[0]):
            _add_into(out, (k,) + a[1:n], s * c)
    memo[w] = out
    return out


def word_kappa(algebra, w):
    """Karoubi operator: kappa(omega da) = (-1)^{|omega|} da omega, identity on degree 0."""
    memo = _memo(algebra, "kappa")
    hit = memo.get(w)
    if hit is not None:
        return hit
    n = len(w) - 1
    out = {}
    if n == 0:
        out[w] = 1
    else:
        s = -1 if (n - 1) % 2 else 1
        an, a0, mid = w[-1], w[0], w[1:-1]
        if a0 == UNIT:
            _add_into(out, (UNIT, an) + mid, s)
        else:
            # dan a0 = d(an a0) - an da0
            for k, c in algebra.mul(an, a0):
                _add_into(out, (UNIT, k) + mid, s * c)
            _add_into(out, (an, a0) + mid, -s)
    memo[w] = out
    return out


def word_B(algebra, w):
    """Connes operator on ``a0 da1 ... dan``: signed cyclic sum of ``da0 ... dan``."""
    if w[0] == UNIT:
        return {}
    n = len(w) - 1
    out = {}
    for i in range(n + 1):
        s = -1 if (n * i) % 2 else 1
        rot = w[n + 1 - i:] + w[:n + 1 - i]
        _add_into(out, (UNIT,) + rot, s)
    return out


# form-level operators


def _apply(form, wordfn, raise_by=0):
    alg = form.algebra
    acc = {}
    dropped = False
    for w, c in form.terms.items():
        if len(w) - 1 + raise_by > form.trunc:
            dropped = True
            continue
        for u, x in wordfn(alg, w).items():
            _add_into(acc, u, c * x)
    return form._like(acc, dropped)


def form_product(w1, w2):
    """Product in the DG algebra; words above the cutoff are dropped and flagged."""
    w1._check(w2)
    alg = w1.algebra
    trunc = min(w1.trunc, w2.trunc)
    acc = {}
    dropped = False
    for u, a in w1.terms.items():
        for v, b in w2.terms.items():
            if len(u) + len(v) - 2 > trunc:
                dropped = True
                continue
            for x, c in word_product(alg, u, v).items():
                _add_into(acc, x, a * b * c)
    return NCForm(alg, acc, trunc, w1.truncated or w2.truncated or dropped)


def differential_d(form):
    return _apply(form, word_d, 1)


def hochschild_b(form):
    return _apply(form, word_b, 0)


def karoubi_kappa(form):
    return _apply(form, word_kappa, 0)


def connes_B(form):
    return _apply(form, word_B, 1)


def graded_commutator(x, y):
    """[x, y] = xy - (-1)^{|x||y|} yx, extended bilinearly over homogeneous parts."""
    out = NCForm.zero(x.algebra, min(x.trunc, y.trunc))
    for p in x.degrees:
        xp = x.component(p)
        for q in y.degrees:
            yq = y.component(q)
            s = -1 if (p * q) % 2 else 1
            out = out + form_product(xp, yq) - s * form_product(yq, xp)
    return out


# spectral projection


def _projector_polynomial(n):
    """Coefficients r_0..r_m with P = r(kappa^2) on degree-n forms.

    kappa^2 is annihilated by q(y) = (y^n - 1)(y^{n+1} - 1), in which y = 1 is a
    double root; r = 1 mod (y-1)^2 and r = 0 mod q/(y-1)^2.
    """
    import sympy

    y = sympy.symbols("y")
    q = sympy.Poly((y**n - 1) * (y ** (n + 1) - 1), y, domain="QQ")
    g = sympy.Poly((y - 1) ** 2, y, domain="QQ")
    h = sympy.div(q, g)[0]
    s, _, one = sympy.gcdex(h, g)
    assert one == 1
    r = sympy.rem(s * h, q)
    coeffs = r.all_coeffs()[::-1]
    return [Fraction(int(c.p), int(c.q)) for c in coeffs]


def projector_polynomial(n):
    cache = _PROJ_CACHE.get(n)
    if cache is None:
        cache = _PROJ_CACHE[n] = _projector_polynomial(n)
    return cache


_PROJ_CACHE = {}


def spectral_projection_P(form):
    """Projection onto the generalized eigenspace of kappa^2 at eigenvalue 1."""
    n = form.homogeneous_degree()
    if n is None or n == 0:
        return form
    r = projector_polynomial(n)
    # Horner in kappa^2
    acc = NCForm.zero(form.algebra, form.trunc)
    for c in reversed(r):
        acc = karoubi_kappa(karoubi_kappa(acc))
        if c:
            acc = acc + form * simplify(c)
    return acc


def projection_P(form):
    """Degreewise spectral projection of an inhomogeneous form."""
    out = NCForm.zero(form.algebra, form.trunc)
    for n in form.degrees:
        out = out + spectral_projection_P(form.component(n))
    return out


# rescaling


def rescale_factor(n):
    """(-1)^[n/2] [n/2]!"""
    k = n // 2
    return (-1) ** k * math.factorial(k)


def rescale_c(form, direction="forward"):
    acc = {}
    for w, c in form.terms.items():
        f = rescale_factor(len(w) - 1)
        acc[w] = c * f if direction == "forward" else c * Fraction(1, f)
    return form._like(acc)


# commutator quotients


class NaturalQuotient:
    """Normal forms in degree-n forms modulo b of degree-(n+1) forms.

    For n = 1 this is the commutator quotient of one-forms; the reduction basis
    is built once per algebra and degree by exact elimination.
    """

    def __init__(self, algebra, n=1):
        self.algebra = algebra
        self.n = n
        self.reducer = SubspaceReducer()
        for w in all_words(algebra, n + 1):
            self.reducer.add(word_b(algebra, w))

    @classmethod
    def of(cls, algebra, n=1):
        memo = _memo(algebra, "natural")
        if n not in memo:
            memo[n] = cls(algebra, n)
        return memo[n]

    def reduce(self, form):
        return self.reducer.reduce(form.component(self.n).terms)

    @property
    def quotient_dim(self):
        return count_words(self.algebra, self.n) - self.reducer.dim


class XOdd:
    """Class of a one-form in the commutator quotient, stored in normal form."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms):
        self.algebra = algebra
        self.terms = dict(terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        return isinstance(other, XOdd) and self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        acc = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(acc, w, c)
        return natural_quotient(NCForm(self.algebra, acc, 1))

    def __neg__(self):
        return XOdd(self.algebra, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return natural_quotient(NCForm(self.algebra, {w: c * v for w, v in self.terms.items()}, 1))

    def as_form(self, trunc=1):
        return NCForm(self.algebra, self.terms, trunc)

    def __repr__(self):
        return f"XOdd({self.as_form().to_text()})"


def natural_quotient(form):
    """Canonical representative of a one-form modulo b of two-forms."""
    ds = form.degrees
    if ds and ds != [1]:
        raise NotDegreeOne(f"expected a one-form, got degrees {ds}")
    q = NaturalQuotient.of(form.algebra, 1)
    return XOdd(form.algebra, q.reduce(form))


# Chern form of a connection


def chern_form(connection, trunc=None):
    """Representative sum_k F^k / k! of the class of exp F with F = dA + A^2.

    The class lives in forms modulo graded commutators; the representative
    returned is the plain exponential series.
    """
    if connection.degrees and connection.degrees != [1]:
        raise NotHomogeneous("connection must be a one-form")
    trunc = connection.trunc if trunc is None else trunc
    a1 = connection.with_trunc(trunc)
    curv = curvature(a1)
    out = NCForm.unit(a1.algebra, trunc)
    power = NCForm.unit(a1.algebra, trunc)
    k = 1
    while 2 * k <= trunc:
        power = form_product(power, curv)
        out = out + power * Fraction(1, math.factorial(k))
        k += 1
    return out


def curvature(connection):
    return differential_d(connection) + form_product(connection, connection)


# enumeration and matrices


def count_words(algebra, n):
    return (algebra.dim + 1) * algebra.dim**n


def all_words(algebra, n):
    """Every basis word of degree n, coefficient letter over the unitalization."""
    letters = range(algebra.dim)
    for a0 in (UNIT, *letters):
        for rest in itertools.product(letters, repeat=n):
            yield (a0, *rest)


def word_index(algebra, w):
    dim = algebra.dim
    idx = w[0] + 1
    for a in w[1:]:
        idx = idx * dim + a
    return idx


def operator_matrix(algebra, wordfn, n, shift):
    """Sparse integer matrix of a word operator from degree n to degree n + shift.

    Only valid for algebras with integral structure constants.
    """
    if not algebra.integral:
        raise ValueError("integer operator matrices need integral structure constants")
    rows, cols, vals = [], [], []
    for w in all_words(algebra, n):
        j = word_index(algebra, w)
        for u, c in wordfn(algebra, w).items():
            rows.append(word_index(algebra, u))
            cols.append(j)
            vals.append(int(c))
    shape = (count_words(algebra, n + shift), count_words(algebra, n))
    return sp.csr_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=shape)
