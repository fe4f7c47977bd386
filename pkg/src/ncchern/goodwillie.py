"""Goodwillie equivalence between X(TA) and the (b+B)-complex of forms over TA.

The tensor algebra is handled in its free basis: a letter of TA is a tuple
``(a1, ..., an)`` of basis indices of A meaning a1 (x) ... (x) an, and the
product is concatenation.  Truncating at total tensor length L is a graded
quotient, and every operator here (d, b, B, kappa, nabla, phi) preserves
total length, so all identities hold exactly below the cutoff.  Forms over
TA reuse :class:`~ncchern.forms.NCForm` with :class:`TensorLetters` as the
algebra; ``UNIT`` is the empty tensor word.
"""

from __future__ import annotations

from .algebra import UNIT
from .errors import AlgebraMismatch, DegreeZeroInput, ParityMismatch
from .fedosov import TensorElem, XChain, fedosov_product
from .forms import NCForm, _add_into, connes_B, differential_d, form_product, hochschild_b
from .scalars import scalar_text


class TensorLetters:
    """Free tensor algebra over A, truncated at total length ``length``."""

    __slots__ = ("base", "length", "cache", "_key")

    def __init__(self, base, length=6):
        self.base = base
        self.length = length
        self.cache = {}
        self._key = (base, length)

    def __eq__(self, other):
        return isinstance(other, TensorLetters) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"TensorLetters({self.base!r}, length={self.length})"

    def mul(self, x, y):
        if x == UNIT:
            return ((y, 1),)
        if y == UNIT:
            return ((x, 1),)
        if len(x) + len(y) > self.length:
            return ()
        return ((x + y, 1),)

    def label(self, x):
        if x == UNIT:
            return "1"
        return "⊗".join(self.base.label(a) for a in x)


def _size(w):
    return sum(0 if x == UNIT else len(x) for x in w)


class OmegaTAForm(NCForm):
    """Form x0 dx1 ... dxn over the tensor algebra; ``trunc`` bounds the outer degree."""

    __slots__ = ()

    @classmethod
    def of(cls, form):
        return cls(form.algebra, form.terms, form.trunc, form.truncated)

    def _like(self, terms, truncated=False):
        return OmegaTAForm(self.algebra, terms, self.trunc, self.truncated or truncated)

    def __add__(self, other):
        return OmegaTAForm.of(NCForm.__add__(self, other))

    __radd__ = __add__

    @property
    def tensor_length(self):
        return max((_size(w) for w in self.terms), default=0)

    def to_text(self):
        if not self.terms:
            return "0"
        lab = self.algebra.label
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda t: repr(t[0])):
            head = [] if w[0] == UNIT and len(w) > 1 else [f"({lab(w[0])})"]
            parts.append(f"{scalar_text(c)}*" + " ".join(head + [f"𝐝({lab(x)})" for x in w[1:]]))
        return " + ".join(parts)

    def __repr__(self):
        return f"OmegaTAForm({self.to_text()})"


def _wrap(form):
    return OmegaTAForm.of(form)


def tensor_word(letters, word, coeff=1, trunc=6):
    """Degree-zero form for a single tensor word (empty tuple gives the unit)."""
    w = tuple(word)
    return OmegaTAForm(letters, {(w if w else UNIT,): coeff}, trunc)


# Fedosov picture <-> tensor basis


def to_tensor(x, letters, trunc=6):
    """Even form over A (Fedosov picture) as a degree-zero form over TA.

    ``a0 da1 da2 ...`` is ``a0 . w(a1,a2) . ...`` with w(a,b) = ab - a (x) b.
    """
    if x.algebra != letters.base:
        raise AlgebraMismatch("form and tensor algebra have different bases")
    A = letters.base
    acc = {}
    for w, c in x.terms.items():
        if (len(w) - 1) % 2:
            raise ParityMismatch("only even forms correspond to tensor elements")
        partial = {() if w[0] == UNIT else (w[0],): c}
        for k in range(1, len(w), 2):
            a, b = w[k], w[k + 1]
            step = {}
            for t, v in partial.items():
                for m, cm in A.mul(a, b):
                    _add_into(step, t + (m,), v * cm)
                _add_into(step, t + (a, b), -v)
            partial = step
        for t, v in partial.items():
            if len(t) <= letters.length:
                _add_into(acc, (t if t else UNIT,), v)
    return OmegaTAForm(letters, acc, trunc)


def _fedosov_of_word(A, t, trunc):
    memo = A.cache.setdefault(("fedosov_word", trunc), {})
    hit = memo.get(t)
    if hit is None:
        if not t:
            hit = NCForm.unit(A, trunc)
        else:
            hit = NCForm.word(A, (t[0],), 1, trunc)
            for a in t[1:]:
                hit = fedosov_product(hit, NCForm.word(A, (a,), 1, trunc))
        memo[t] = hit
    return hit


def to_fedosov(x, trunc=None):
    """Degree-zero form over TA as an even form over A (a1 (x) ... (x) an -> a1 . ... . an)."""
    letters = x.algebra
    trunc = trunc if trunc is not None else 2 * letters.length
    out = NCForm.zero(letters.base, trunc)
    for w, c in x.terms.items():
        if len(w) != 1:
            raise ParityMismatch("expected a degree-zero form over TA")
        t = () if w[0] == UNIT else w[0]
        out = out + _fedosov_of_word(letters.base, t, trunc) * c
    return TensorElem.of(out)


def natural_one_form(omega):
    """Canonical representative of a one-form class: sum of z da with a a letter of A.

    Uses natural(x d(a1...am)) = sum_j natural((a_{j+1}...am x a1...a_{j-1}) d a_j).
    """
    letters = omega.algebra
    acc = {}
    for w, c in omega.terms.items():
        if len(w) != 2:
            raise ParityMismatch("expected a one-form over TA")
        x = () if w[0] == UNIT else w[0]
        y = w[1]
        for j in range(len(y)):
            z = y[j + 1:] + x + y[:j]
            _add_into(acc, (z if z else UNIT, (y[j],)), c)
    return OmegaTAForm(letters, acc, omega.trunc)


def one_form_to_odd(omega, trunc=None):
    """Class of a one-form over TA as an odd form over A (z da -> z da)."""
    letters = omega.algebra
    trunc = trunc if trunc is not None else 2 * letters.length
    A = letters.base
    out = NCForm.zero(A, trunc)
    for w, c in natural_one_form(omega).terms.items():
        z = () if w[0] == UNIT else w[0]
        out = out + form_product(_fedosov_of_word(A, z, trunc), NCForm.word(A, (UNIT, w[1][0]), 1, trunc)) * c
    return out


def odd_to_one_form(xi, letters, trunc=6):
    """Odd form over A as a canonical one-form over TA (x da -> x 𝐝a)."""
    acc = {}
    for w, c in xi.terms.items():
        if (len(w) - 1) % 2 == 0:
            raise ParityMismatch("expected an odd form")
        body = NCForm(xi.algebra, {w[:-1]: c}, xi.trunc)
        for u, v in to_tensor(body, letters).terms.items():
            _add_into(acc, (u[0], (w[-1],)), v)
    return OmegaTAForm(letters, acc, trunc)


# X-complex of TA in the tensor basis


def x_tensor_boundary(even, odd):
    """X(TA) boundaries on representatives: (b(odd), 𝐝 even)."""
    return _wrap(hochschild_b(odd)), _wrap(differential_d(even))


def xchain_to_tensor(chain, letters, trunc=6):
    return to_tensor(chain.even, letters, trunc), odd_to_one_form(chain.odd, letters, trunc)


def tensor_to_xchain(even, odd, trunc=None):
    return XChain(to_fedosov(even, trunc), one_form_to_odd(odd, trunc))


# connection and phi


def phi_letter(letters, x, trunc=6):
    """phi(a1 (x) ... (x) an) = sum_i (a1...a_{i-1}) 𝐝a_i 𝐝(a_{i+1}...an)."""
    acc = {}
    if x != UNIT:
        for i in range(len(x) - 1):
            pre = x[:i]
            _add_into(acc, (pre if pre else UNIT, (x[i],), x[i + 1:]), 1)
    return OmegaTAForm(letters, acc, trunc)


def _left_times(letters, x0, form_terms, c, acc):
    for w, v in form_terms.items():
        for k, m in letters.mul(x0, w[0]):
            _add_into(acc, (k,) + w[1:], c * v * m)


def connection_nabla(omega):
    """Right connection: nabla(x0 𝐝x1 𝐝x2 ...) = x0 phi(x1) 𝐝x2 ..., outer degree +1."""
    letters = omega.algebra
    acc = {}
    dropped = False
    for w, c in omega.terms.items():
        n = len(w) - 1
        if n == 0:
            raise DegreeZeroInput("the connection is defined on forms of degree >= 1")
        if n + 1 > omega.trunc:
            dropped = True
            continue
        ph = phi_letter(letters, w[1], omega.trunc).terms
        tail = w[2:]
        _left_times(letters, w[0], {u + tail: v for u, v in ph.items()}, c, acc)
    return OmegaTAForm(letters, acc, omega.trunc, omega.truncated or dropped)


def phi(x):
    """phi on TA (degree-zero input) or on forms, where it is nabla B; raises the degree by 2."""
    if isinstance(x, TensorElem) or (isinstance(x, NCForm) and not isinstance(x.algebra, TensorLetters)):
        raise AlgebraMismatch("convert tensor elements with to_tensor first")
    return phi_on_forms(x)


def phi_on_forms(omega):
    Bw = connes_B(omega)
    if not Bw:
        return OmegaTAForm(omega.algebra, {}, omega.trunc, Bw.truncated)
    return connection_nabla(Bw)


def one_minus_phi_inv(omega):
    """(1 - phi)^{-1} = sum of phi^k; finite because phi is nilpotent."""
    out = _wrap(omega)
    term = _wrap(omega)
    while term:
        term = phi_on_forms(term)
        out = out + term
    return _wrap(out)


# gamma, pi, Q and the homotopy


def gamma(even, odd):
    """Chain map X(TA) -> forms over TA: x -> (1-phi)^{-1} x, x𝐝y -> (1-phi)^{-1}(x𝐝y + b(x phi(y)))."""
    out = one_minus_phi_inv(even)
    if odd:
        out = out + one_minus_phi_inv(odd + _wrap(hochschild_b(connection_nabla(odd))))
    return _wrap(out)


def pi_projection(omega):
    """Natural projection onto X(TA): degree-zero part and the class of the degree-one part."""
    return omega.component(0), natural_one_form(omega.component(1))


def Q(omega):
    return gamma(*pi_projection(omega))


def homotopy_h(omega):
    """h = (1 - phi)^{-1} nabla (1 - Q); the degree-zero part of 1 - Q vanishes."""
    rest = _wrap(omega - Q(omega))
    rest = rest - rest.component(0)
    return one_minus_phi_inv(connection_nabla(rest))


def b_plus_B(omega):
    return _wrap(hochschild_b(omega) + connes_B(omega))
