"""Bar coalgebra of the unitalization, its free bicomodule, and algebra cochains.

Bar words are tuples of basis indices of the unitalization (``UNIT`` is the
adjoined unit); bimodule words are triples ``(left, a, right)`` standing for
``(a1..a_{i-1} | a_i | a_{i+1}..a_n)``.  Cochains are finite tables from
words to elements of a unital DG algebra of matrices.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .algebra import UNIT
from .errors import PreconditionViolated, TargetMismatch, TruncationOverflow
from .forms import NCForm, _add_into, connes_B, hochschild_b


def koszul(*pairs):
    """(-1)^(sum of x*y) for degree pairs (x, y); the one sign rule used below."""
    return -1 if sum(x * y for x, y in pairs) % 2 else 1


def _bimod_degree(e):
    left, _, right = e
    return len(left) + 1 + len(right)


class _Chains:
    __slots__ = ("algebra", "terms", "n_bar")

    def __init__(self, algebra, terms=None, n_bar=6):
        self.algebra = algebra
        self.n_bar = n_bar
        acc = {}
        for w, c in (terms or {}).items():
            if self._length(w) > n_bar:
                raise TruncationOverflow(f"word of length {self._length(w)} exceeds {n_bar}")
            _add_into(acc, w, c)
        self.terms = acc

    def _like(self, terms):
        return type(self)(self.algebra, terms, self.n_bar)

    def __add__(self, other):
        acc = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(acc, w, c)
        return self._like(acc)

    def __neg__(self):
        return self._like({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return self._like({w: c * v for w, v in self.terms.items()})

    def __eq__(self, other):
        return type(self) is type(other) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"{type(self).__name__}({self.terms})"


class BarChain(_Chains):
    """Element of the bar construction; the empty word is the degree-zero generator."""

    __slots__ = ()

    @staticmethod
    def _length(w):
        return len(w)


class BarBimodElem(_Chains):
    """Element of the free bicomodule, words ``(left, a, right)``."""

    __slots__ = ()

    @staticmethod
    def _length(w):
        return _bimod_degree(w)


# differentials


def _bprime_word(alg, w):
    out = {}
    for i in range(len(w) - 1):
        s = 1 if i % 2 == 0 else -1
        for k, c in alg.mul(w[i], w[i + 1]):
            _add_into(out, w[:i] + (k,) + w[i + 2:], s * c)
    return out


def bar_bprime(chain):
    """b'(a1..an) = sum_{i=1}^{n-1} (-1)^{i-1} (a1, .., a_i a_{i+1}, .., an)."""
    acc = {}
    for w, c in chain.terms.items():
        for u, v in _bprime_word(chain.algebra, w).items():
            _add_into(acc, u, c * v)
    return chain._like(acc)


def bimod_bdprime(elem):
    alg = elem.algebra
    acc = {}
    for (left, a, right), c in elem.terms.items():
        i = len(left) + 1
        si = 1 if i % 2 == 0 else -1
        for u, v in _bprime_word(alg, left).items():
            _add_into(acc, (u, a, right), c * v)
        if left:
            for k, v in alg.mul(left[-1], a):
                _add_into(acc, (left[:-1], k, right), si * c * v)
        if right:
            for k, v in alg.mul(a, right[0]):
                _add_into(acc, (left, k, right[1:]), -si * c * v)
        for u, v in _bprime_word(alg, right).items():
            _add_into(acc, (left, a, u), si * c * v)
    return elem._like(acc)


def coderivation_partial(elem):
    acc = {}
    for (left, a, right), c in elem.terms.items():
        _add_into(acc, left + (a,) + right, c)
    return BarChain(elem.algebra, acc, elem.n_bar)


# coproducts; tensor products are dicts {(x, y): c}


def coproduct(chain):
    acc = {}
    for w, c in chain.terms.items():
        for i in range(len(w) + 1):
            _add_into(acc, (w[:i], w[i:]), c)
    return acc


def comodule_left(elem):
    acc = {}
    for (left, a, right), c in elem.terms.items():
        for j in range(len(left) + 1):
            _add_into(acc, (left[:j], (left[j:], a, right)), c)
    return acc


def comodule_right(elem):
    acc = {}
    for (left, a, right), c in elem.terms.items():
        for k in range(len(right) + 1):
            _add_into(acc, ((left, a, right[:k]), right[k:]), c)
    return acc


def _deg(x):
    return _bimod_degree(x) if len(x) == 3 and isinstance(x[0], tuple) else len(x)


def sigma_flip(tensor):
    """Swap the two factors of a tensor dict with the Koszul sign of their degrees."""
    acc = {}
    for (x, y), c in tensor.items():
        _add_into(acc, (y, x), koszul((_deg(x), _deg(y))) * c)
    return acc


def tensor_apply(tensor, left=None, right=None, left_deg=0, right_deg=0):
    """(F (x) G) on a tensor dict, F and G word maps returning dicts; Koszul signs included."""
    acc = {}
    for (x, y), c in tensor.items():
        xs = left(x) if left else {x: 1}
        ys = right(y) if right else {y: 1}
        s = koszul((right_deg, _deg(x)))
        for u, a in xs.items():
            for v, b in ys.items():
                _add_into(acc, (u, v), s * c * a * b)
    return acc


# the cotrace


def cotrace_natural(form, n_bar=6):
    """natural(a0 da1..dan) = sum_i (-1)^{n(i+1)} (a_{i+1}..an | a0 | a1..ai)."""
    acc = {}
    for w, c in form.terms.items():
        n = len(w) - 1
        if n + 1 > n_bar:
            raise TruncationOverflow(f"degree {n} form needs bar length {n + 1} > {n_bar}")
        for i in range(n + 1):
            s = -1 if (n * (i + 1)) % 2 else 1
            _add_into(acc, (w[i + 1:], w[0], w[1:i + 1]), s * c)
    return BarBimodElem(form.algebra, acc, n_bar)


# cochains


class MatrixDGA:
    """End(C^{p|q}) with differential d X = [delta, X] (graded), delta odd with delta^2 = 0."""

    def __init__(self, p, q, delta=None):
        self.p, self.q = p, q
        n = p + q
        self.delta = delta if delta is not None else np.zeros((n, n), dtype=object)
        self.grading = np.diag([1] * p + [-1] * q).astype(object)

    def __eq__(self, other):
        return (
            isinstance(other, MatrixDGA)
            and (self.p, self.q) == (other.p, other.q)
            and np.array_equal(self.delta, other.delta)
        )

    @property
    def unit(self):
        return np.eye(self.p + self.q, dtype=object) + 0 * Fraction(0)

    def zero(self):
        return np.zeros((self.p + self.q, self.p + self.q), dtype=object)

    def parity(self, m):
        p = self.p
        even = any(x != 0 for x in np.concatenate([m[:p, :p].ravel(), m[p:, p:].ravel()]))
        odd = any(x != 0 for x in np.concatenate([m[:p, p:].ravel(), m[p:, :p].ravel()]))
        if even and odd:
            return None
        return 1 if odd else 0

    def d(self, m):
        s = self.parity(m)
        if s is None:
            p = self.p
            ev = m.copy()
            ev[:p, p:] = 0
            ev[p:, :p] = 0
            return self.d(ev) + self.d(m - ev)
        return self.delta.dot(m) - (-1) ** s * m.dot(self.delta)

    def trace(self, m):
        """Supertrace, a graded trace on this algebra."""
        return sum(self.grading[i, i] * m[i, i] for i in range(self.p + self.q))


def _is_zero(m):
    return not any(x != 0 for x in np.asarray(m).ravel())


class BarCochain:
    """Finite table of values on bar words (or bimodule words when ``bimodule``)."""

    __slots__ = ("target", "parity", "table", "n_bar", "bimodule")

    def __init__(self, target, parity, table=None, n_bar=6, bimodule=False):
        self.target = target
        self.parity = parity % 2
        self.n_bar = n_bar
        self.bimodule = bimodule
        clean = {}
        for w, m in (table or {}).items():
            m = np.asarray(m, dtype=object)
            if _is_zero(m):
                continue
            length = _bimod_degree(w) if bimodule else len(w)
            if length > n_bar:
                continue
            par = target.parity(m)
            if par is not None and (par + length) % 2 != self.parity:
                raise ValueError(f"value on {w} has the wrong parity for a degree-{parity} cochain")
            clean[w] = m
        self.table = clean

    def __call__(self, w):
        hit = self.table.get(w)
        return hit if hit is not None else self.target.zero()

    def _like(self, table, parity=None, bimodule=None):
        return BarCochain(
            self.target,
            self.parity if parity is None else parity,
            table,
            self.n_bar,
            self.bimodule if bimodule is None else bimodule,
        )

    def _check(self, other):
        if other.target != self.target:
            raise TargetMismatch("cochains take values in different algebras")

    def __add__(self, other):
        self._check(other)
        table = dict(self.table)
        for w, m in other.table.items():
            table[w] = table[w] + m if w in table else m
        return self._like(table)

    def __neg__(self):
        return self._like({w: -m for w, m in self.table.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return self._like({w: c * m for w, m in self.table.items()})

    def __eq__(self, other):
        if not isinstance(other, BarCochain) or other.bimodule != self.bimodule:
            return NotImplemented
        keys = set(self.table) | set(other.table)
        return all(_is_zero(self(w) - other(w)) for w in keys)

    def __bool__(self):
        return bool(self.table)

    def on(self, chain):
        """Evaluate on a chain (BarChain, BarBimodElem or a plain dict of words)."""
        terms = chain.terms if hasattr(chain, "terms") else chain
        out = self.target.zero()
        for w, c in terms.items():
            out = out + c * self(w)
        return out

    def __repr__(self):
        return f"BarCochain(parity={self.parity}, support={sorted(self.table, key=repr)})"


def unit_cochain(target, n_bar=6):
    """1 eta: the identity on the empty word."""
    return BarCochain(target, 0, {(): target.unit}, n_bar)


def cochain_from_map(target, rho, n_bar=6):
    """A linear map on basis letters viewed as a one-letter cochain; parity 1 for even values."""
    return BarCochain(target, 1, {(a,): m for a, m in rho.items()}, n_bar)


def convolve(f, g):
    """(fg)(a1..an) = sum_i (-1)^{|g| i} f(a1..ai) g(a_{i+1}..an)."""
    f._check(g)
    table = {}
    for u, fu in f.table.items():
        for v, gv in g.table.items():
            w = u + v
            if len(w) > f.n_bar:
                continue
            val = koszul((g.parity, len(u))) * fu.dot(gv)
            table[w] = table[w] + val if w in table else val
    return f._like(table, (f.parity + g.parity) % 2)


def bimod_act(f, gam, side="left"):
    """Left action (f gam) through Delta_l, or right action (gam f) through Delta_r."""
    f._check(gam)
    table = {}
    n_bar = f.n_bar
    if side == "left":
        for u, fu in f.table.items():
            for (left, a, right), gv in gam.table.items():
                w = (u + left, a, right)
                if _bimod_degree(w) > n_bar:
                    continue
                val = koszul((gam.parity, len(u))) * fu.dot(gv)
                table[w] = table[w] + val if w in table else val
    else:
        for (left, a, right), gv in gam.table.items():
            for v, fv in f.table.items():
                w = (left, a, right + v)
                if _bimod_degree(w) > n_bar:
                    continue
                val = koszul((f.parity, _bimod_degree((left, a, right)))) * gv.dot(fv)
                table[w] = table[w] + val if w in table else val
    return gam._like(table, (f.parity + gam.parity) % 2, True)


def _letters(alg):
    return [UNIT] + list(range(alg.dim))


def _split_candidates(alg, word, marker=None):
    """Words that a single adjacent product could send onto ``word``."""
    out = set()
    pairs = {}
    for x in _letters(alg):
        for y in _letters(alg):
            for k, _ in alg.mul(x, y):
                pairs.setdefault(k, []).append((x, y))
    for k, letter in enumerate(word):
        for x, y in pairs.get(letter, ()):
            w = word[:k] + (x, y) + word[k + 1:]
            if marker is None:
                out.add(w)
            elif k < marker:
                out.add((w, marker + 1))
            elif k > marker:
                out.add((w, marker))
            else:
                out.add((w, marker))
                out.add((w, marker + 1))
    return out


def _pullback(f, op_on_word, algebra):
    """Table of f composed with a product-contracting word operator."""
    cands = set()
    for u in f.table:
        if f.bimodule:
            left, a, right = u
            for w, m in _split_candidates(algebra, left + (a,) + right, len(left)):
                cands.add((w[:m], w[m], w[m + 1:]))
        else:
            cands |= _split_candidates(algebra, u)
    table = {}
    for w in cands:
        length = _bimod_degree(w) if f.bimodule else len(w)
        if length > f.n_bar:
            continue
        acc = f.target.zero()
        for u, c in op_on_word(w).items():
            if u in f.table:
                acc = acc + c * f.table[u]
        if not _is_zero(acc):
            table[w] = acc
    return table


def delta_R(f, algebra):
    """delta f = -(-1)^{|f|} f o b' (or f o b'' on bimodule cochains)."""
    if f.bimodule:

        def op(w):
            return bimod_bdprime(BarBimodElem(algebra, {w: 1}, f.n_bar + 1)).terms

    else:

        def op(w):
            return _bprime_word(algebra, w)

    s = -koszul((f.parity, 1))
    table = {w: s * m for w, m in _pullback(f, op, algebra).items()}
    return f._like(table, f.parity + 1)


def d_R(f):
    d = f.target.d
    return f._like({w: d(m) for w, m in f.table.items()}, f.parity + 1)


def partial_R(f):
    """Transpose of the coderivation: (partial f)(L|a|R) = f(L a R)."""
    table = {}
    for w, m in f.table.items():
        for i in range(len(w)):
            table[(w[:i], w[i], w[i + 1:])] = m
    return f._like(table, f.parity, True)


def evaluate_on_form(gam, form):
    """gam composed with the cotrace, evaluated on a form."""
    return gam.on(cotrace_natural(form, gam.n_bar))


def delta_intertwines_b(gam, form, algebra=None):
    """delta gam natural = -(-1)^{|gam|} gam natural b, evaluated on ``form``."""
    alg = algebra if algebra is not None else form.algebra
    lhs = evaluate_on_form(delta_R(gam, alg), form)
    rhs = -koszul((gam.parity, 1)) * evaluate_on_form(gam, hochschild_b(form))
    return _is_zero(lhs - rhs)


def partial_product_intertwines_B(f, g, rho, form):
    """partial(fg) natural = (-1)^{|g|} f (partial rho) g natural B, evaluated on ``form``.

    ``rho`` is a one-letter cochain that must send the unit to 1; ``f`` and
    ``g`` must vanish whenever an argument is the unit.
    """
    target = rho.target
    u = rho((UNIT,))
    if not np.array_equal(np.asarray(u, dtype=object), target.unit):
        raise PreconditionViolated("rho must be unital")
    for c in (f, g):
        if any(UNIT in w for w in c.table):
            raise PreconditionViolated("cochains must vanish on the unit")
    lhs = evaluate_on_form(partial_R(convolve(f, g)), form)
    mid = bimod_act(g, bimod_act(f, partial_R(rho), "left"), "right")
    rhs = koszul((g.parity, 1)) * evaluate_on_form(mid, connes_B(form))
    return _is_zero(lhs - rhs)


def trace_on_forms(gam, form):
    """tau(gam natural)(form) with tau the supertrace of the target."""
    return gam.target.trace(evaluate_on_form(gam, form))


__all__ = [
    "BarBimodElem",
    "BarChain",
    "BarCochain",
    "MatrixDGA",
    "NCForm",
    "bar_bprime",
    "bimod_act",
    "bimod_bdprime",
    "cochain_from_map",
    "coderivation_partial",
    "comodule_left",
    "comodule_right",
    "convolve",
    "coproduct",
    "cotrace_natural",
    "d_R",
    "delta_R",
    "evaluate_on_form",
    "koszul",
    "delta_intertwines_b",
    "partial_product_intertwines_B",
    "partial_R",
    "sigma_flip",
    "tensor_apply",
    "trace_on_forms",
    "unit_cochain",
]
