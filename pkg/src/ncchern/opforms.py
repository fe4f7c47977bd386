"""Operator-valued differential forms.

An :class:`OperatorForm` is a finite sum ``sum_w M_w (x) w`` with ``M_w`` a
matrix on a graded space C^{p|q} and ``w`` a word of the unitalized form
algebra over a coefficient algebra B.  It acts on ``C^{p|q} (x) Omega B`` by

    (T (x) u)(h (x) v) = (-1)^{|u||h|} T h (x) u v,

which gives the Koszul product and differential

    (T (x) u)(S (x) v) = T G^{|u|} S G^{|u|} (x) u v,
    d(T (x) u)         = G T G (x) du,

with ``G`` the grading operator.  Rectangular matrices (``cols`` grading)
represent vectors and module maps.
"""

from __future__ import annotations

import numpy as np

from .algebra import UNIT
from .errors import AlgebraMismatch, DimensionMismatch, TruncationOverflow
from .forms import NCForm, _add_into, word_d, word_product


def _zero_matrix(m):
    return not any(x != 0 for x in np.asarray(m).ravel())


def gamma_conj(m, rows, cols):
    """G m G: flips the sign of the off-diagonal blocks."""
    out = np.array(m, copy=True)
    out[:rows, cols:] = -out[:rows, cols:]
    out[rows:, :cols] = -out[rows:, :cols]
    return out


def _block_parity(m, rows, cols):
    m = np.asarray(m)
    diag = not (_zero_matrix(m[:rows, :cols]) and _zero_matrix(m[rows:, cols:]))
    off = not (_zero_matrix(m[:rows, cols:]) and _zero_matrix(m[rows:, :cols]))
    if diag and off:
        return None
    return 1 if off else 0


class OperatorForm:
    """Truncated element of End(C^{p|q}) (x) (unitalized forms over ``algebra``)."""

    __slots__ = ("algebra", "p", "q", "cols", "trunc", "terms")

    def __init__(self, algebra, p, q, terms=None, trunc=4, cols=None):
        self.algebra = algebra
        self.p, self.q = p, q
        self.cols = tuple(cols) if cols is not None else (p, q)
        self.trunc = trunc
        clean = {}
        shape = (p + q, sum(self.cols))
        for w, m in (terms or {}).items():
            m = np.asarray(m)
            if m.shape != shape:
                raise DimensionMismatch(f"coefficient shape {m.shape}, expected {shape}")
            if len(w) - 1 > trunc or _zero_matrix(m):
                continue
            w = tuple(w)
            clean[w] = clean[w] + m if w in clean else m
        self.terms = {w: m for w, m in clean.items() if not _zero_matrix(m)}

    # constructors

    @classmethod
    def constant(cls, algebra, matrix, p, trunc=4, cols=None):
        matrix = np.asarray(matrix)
        return cls(algebra, p, matrix.shape[0] - p, {(UNIT,): matrix}, trunc, cols)

    @classmethod
    def from_coefficients(cls, algebra, coeffs, p, trunc=4, cols=None):
        """``coeffs`` maps a basis index (or ``UNIT``) of B to a matrix."""
        first = np.asarray(next(iter(coeffs.values())))
        return cls(algebra, p, first.shape[0] - p, {(k,): m for k, m in coeffs.items()}, trunc, cols)

    def _like(self, terms, cols=None):
        return OperatorForm(self.algebra, self.p, self.q, terms, self.trunc, cols or self.cols)

    @property
    def shape(self):
        return (self.p + self.q, sum(self.cols))

    @property
    def exact(self):
        return all(m.dtype == object for m in self.terms.values())

    def zero_like(self):
        return self._like({})

    # linear structure

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        acc = dict(self.terms)
        for w, m in other.terms.items():
            acc[w] = acc[w] + m if w in acc else m
        return OperatorForm(self.algebra, self.p, self.q, acc, min(self.trunc, other.trunc), self.cols)

    __radd__ = __add__

    def __neg__(self):
        return self._like({w: -m for w, m in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, OperatorForm):
            return self @ c
        return self._like({w: m * c for w, m in self.terms.items()})

    __rmul__ = __mul__

    def _check(self, other):
        if not isinstance(other, OperatorForm):
            raise TypeError("expected an OperatorForm")
        if other.algebra != self.algebra:
            raise AlgebraMismatch("operator forms over different coefficient algebras")

    def __matmul__(self, other):
        self._check(other)
        if self.cols != (other.p, other.q):
            raise DimensionMismatch("inner gradings do not match")
        trunc = min(self.trunc, other.trunc)
        alg = self.algebra
        acc = {}
        for u, a in self.terms.items():
            du = len(u) - 1
            for v, b in other.terms.items():
                if du + len(v) - 1 > trunc:
                    continue
                bb = gamma_conj(b, other.p, other.cols[0]) if du % 2 else b
                prod = a.dot(bb)
                if _zero_matrix(prod):
                    continue
                for w, c in word_product(alg, u, v).items():
                    term = prod * c
                    acc[w] = acc[w] + term if w in acc else term
        return OperatorForm(alg, self.p, self.q, acc, trunc, other.cols)

    def d(self):
        """Differential; words above the cutoff are dropped."""
        acc = {}
        for w, m in self.terms.items():
            if len(w) > self.trunc:
                continue
            for u, c in word_d(self.algebra, w).items():
                acc[u] = gamma_conj(m, self.p, self.cols[0]) * c
        return self._like(acc)

    # gradings

    def component(self, n):
        return self._like({w: m for w, m in self.terms.items() if len(w) - 1 == n})

    def form_degrees(self):
        return sorted({len(w) - 1 for w in self.terms})

    def parity(self):
        """Total parity (matrix parity + form degree), or None if mixed."""
        ps = set()
        for w, m in self.terms.items():
            bp = _block_parity(m, self.p, self.cols[0])
            if bp is None:
                return None
            ps.add((bp + len(w) - 1) % 2)
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def scalar_part(self):
        """Matrix coefficient of the unit word."""
        m = self.terms.get((UNIT,))
        if m is None:
            dtype = object if self.exact and self.terms else complex
            return np.zeros(self.shape, dtype=dtype)
        return m

    def without_scalar_part(self):
        return self._like({w: m for w, m in self.terms.items() if w != (UNIT,)})

    def to_complex(self):
        return self._like({w: np.asarray(m, dtype=complex) for w, m in self.terms.items()})

    def max_abs(self):
        return max((float(np.max(np.abs(np.asarray(m, dtype=complex)))) for m in self.terms.values()), default=0.0)

    def conjugate_by(self, u, uinv):
        """u X u^{-1} for constant matrices u (even, invertible)."""
        return self._like({w: u.dot(m).dot(uinv) for w, m in self.terms.items()})

    # traces

    def supertrace(self):
        """Even partial supertrace: str(M_w) w, as a form over the coefficient algebra."""
        acc = {}
        p = self.p
        for w, m in self.terms.items():
            s = sum(m[k, k] for k in range(p)) - sum(m[k, k] for k in range(p, p + self.q))
            if s != 0:
                _add_into(acc, w, s)
        return NCForm(self.algebra, acc, self.trunc)

    def odd_trace(self, zeta, twist=True):
        """Odd partial supertrace on C^{k|k} = K (x) C_1: zeta Tr(y) for M = x + eps y.

        With ``twist`` the form degree contributes (-1)^{|w|}, from moving the
        Clifford generator past the form.
        """
        if self.p != self.q:
            raise DimensionMismatch("odd trace needs p == q")
        k = self.p
        acc = {}
        for w, m in self.terms.items():
            s = sum(m[j, k + j] for j in range(k))
            if twist and (len(w) - 1) % 2:
                s = -s
            if s != 0:
                _add_into(acc, w, zeta * s)
        return NCForm(self.algebra, acc, self.trunc)

    def __repr__(self):
        return f"OperatorForm({self.p}|{self.q}, words={sorted(self.terms)})"


def fedosov_op_product(x, y):
    """x (.) y = x y - dx dy for even operator forms."""
    return (x @ y) - (x.d() @ y.d())


def fedosov_act(x, xi):
    """Fedosov-type action of an even operator form on an even vector form."""
    return (x @ xi) - (x.d() @ xi.d())


# ordered integrals with heat factors


def _word_support(alg, left, right, trunc):
    out = set()
    for u in left:
        for v in right:
            if len(u) + len(v) - 2 > trunc:
                continue
            out.update(word_product(alg, u, v))
    return out


def ordered_integral(H0, factors, t=1.0):
    """int_{t Delta_m} e^{-s0 H0} F1 e^{-s1 H0} ... Fm e^{-sm H0} in the operator-form algebra.

    ``H0`` is an even constant matrix, so the heat factors commute with the
    grading and only the Koszul signs of the form words enter.
    """
    from .simplex import duhamel_integral

    if not factors:
        raise ValueError("need at least one factor")
    f0 = factors[0]
    alg, p, q, trunc = f0.algebra, f0.p, f0.q, min(f.trunc for f in factors)
    rows = p
    acc = {}
    term_lists = [list(f.terms.items()) for f in factors]

    def rec(k, words, deg_words, mats):
        if k == len(factors):
            val = duhamel_integral(H0, mats, t)
            for w, c in words.items():
                term = val * c
                acc[w] = acc[w] + term if w in acc else term
            return
        for w, m in term_lists[k]:
            new = {}
            for u, c in words.items():
                if len(u) + len(w) - 2 > trunc:
                    continue
                for x, e in word_product(alg, u, w).items():
                    _add_into(new, x, c * e)
            if not new:
                continue
            # parity of the words to the left (all words in ``words`` share a degree)
            mm = gamma_conj(m, rows, rows) if deg_words % 2 else m
            rec(k + 1, new, deg_words + len(w) - 1, mats + [mm])

    rec(0, {(UNIT,): 1}, 0, [])
    return OperatorForm(alg, p, q, acc, trunc)


def exp_sandwich(H0, V, factors, t=1.0, sign=-1, max_insertions=48):
    """int_{t Delta_m} e^{-s0 (H0 + V)} F1 ... Fm e^{-sm (H0 + V)} expanded in ``V``.

    ``V`` must be nilpotent for the word structure (no unit-word part); the
    expansion stops once every product of its words with the factors vanishes
    or exceeds the cutoff.  ``sign=+1`` gives the exponentials e^{+s(H0 + V)}
    (pass ``-H0`` accordingly).
    """
    alg = V.algebra if V is not None else factors[0].algebra
    trunc = min([f.trunc for f in factors] + ([V.trunc] if V is not None else []))
    vwords = list(V.terms) if V is not None else []
    if (UNIT,) in vwords:
        raise ValueError("perturbation must not contain a unit-word part")
    m = len(factors)
    total = None
    # each sequence is a list of factor objects; insertions of V carry a sign
    stack = [((), 0, {(UNIT,)}, 0)]
    while stack:
        seq, placed, support, nins = stack.pop()
        if placed == m:
            if seq:
                val = ordered_integral(H0, list(seq), t)
                coeff = sign**nins
                val = val * coeff if coeff != 1 else val
            else:
                val = None
            if val is not None:
                total = val if total is None else total + val
            # may still insert more V at the end
        if nins >= max_insertions:
            raise TruncationOverflow("perturbation series did not terminate")
        if vwords:
            sup = _word_support(alg, support, vwords, trunc)
            if sup:
                stack.append((seq + (V,), placed, sup, nins + 1))
        if placed < m:
            f = factors[placed]
            sup = _word_support(alg, support, list(f.terms), trunc)
            if sup:
                stack.append((seq + (f,), placed + 1, sup, nins))
    if total is None:
        ref = factors[0] if factors else V
        total = ref.zero_like()
    return total


def exponential(H0, V, t=1.0):
    """e^{-t (H0 + V)} as an operator form (H0 constant even matrix, V nilpotent)."""
    from .simplex import duhamel_integral

    base = V._like({(UNIT,): duhamel_integral(H0, [], t)})
    return base + _series_no_factors(H0, V, t)


def _series_no_factors(H0, V, t):
    # sum_{k>=1} (-1)^k int e V e ... V e
    out = V.zero_like()
    k = 1
    while True:
        seqs = [V] * k
        support = {(UNIT,)}
        for f in seqs:
            support = _word_support(V.algebra, support, list(f.terms), V.trunc)
            if not support:
                break
        if not support:
            return out
        out = out + ordered_integral(H0, seqs, t) * ((-1) ** k)
        k += 1
        if k > 64:
            raise TruncationOverflow("perturbation series did not terminate")


__all__ = [
    "OperatorForm",
    "gamma_conj",
    "fedosov_op_product",
    "fedosov_act",
    "ordered_integral",
    "exp_sandwich",
    "exponential",
]
