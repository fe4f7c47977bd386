"""Scalar towers.

Three modes are kept apart:

* exact     -- Gaussian rationals Q(i), built on :class:`fractions.Fraction`.
* symbolic  -- finite sums of c * pi^(p/2) * lam^(q/2) with c in Q(i).
* float     -- Python/numpy complex doubles.

Plain ``int`` and ``Fraction`` values are treated as exact and mix freely
with both exact types.  Mixing an exact or symbolic value with a float or
complex raises :class:`ModeError`; use :func:`lower` to cross over.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import ModeError

EXACT = "exact"
SYMBOLIC = "symbolic"
FLOAT = "float"
MODES = (EXACT, SYMBOLIC, FLOAT)


def _is_inexact(x):
    return isinstance(x, (float, complex, np.floating, np.complexfloating))


class Gaussian:
    """Exact element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if _is_inexact(re) or _is_inexact(im):
            raise ModeError("Gaussian parts must be exact rationals")
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def coerce(x):
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, Rational):
            return Gaussian(x, 0)
        if _is_inexact(x):
            raise ModeError(f"cannot mix exact and float scalars ({x!r})")
        return NotImplemented

    def __add__(self, other):
        o = Gaussian.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = Gaussian.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Gaussian(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = Gaussian.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = Gaussian.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Gaussian.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("Gaussian division by zero")
        return self * Gaussian(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        o = Gaussian.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (1 / self) ** (-k)
        out, base = Gaussian(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __pos__(self):
        return self

    def __abs__(self):
        return math.hypot(self.re, self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if _is_inexact(other):
            return False
        o = Gaussian.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def conjugate(self):
        return Gaussian(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


I = Gaussian(0, 1)
# fixed branch of sqrt(2i)
SQRT_2I = Gaussian(1, 1)


def simplify(x):
    """Collapse a Gaussian with zero imaginary part to int/Fraction."""
    if isinstance(x, Gaussian) and x.im == 0:
        x = x.re
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def scalar_text(c):
    """Short printable form; exact values read back through :func:`exact`."""
    if isinstance(c, Fraction):
        return str(c)
    return repr(c)


def exact(x):
    """Coerce user input to an exact scalar (int, Fraction or Gaussian)."""
    if isinstance(x, (int, Fraction, Gaussian)) and not isinstance(x, bool):
        return simplify(x)
    if isinstance(x, str):
        z = x.replace(" ", "")
        if z.startswith("(") and z.endswith(")"):
            z = z[1:-1]
        if z.endswith("i"):
            body = z[:-1]
            for k in range(len(body) - 1, 0, -1):
                if body[k] in "+-":
                    return simplify(Gaussian(Fraction(body[:k]), Fraction(body[k:] or "1")))
            return simplify(Gaussian(0, Fraction(body if body not in ("", "+", "-") else body + "1")))
        return simplify(Fraction(z))
    if isinstance(x, Rational):
        return simplify(Fraction(x))
    raise ModeError(f"not an exact scalar: {x!r}")


class MonomialSum:
    """Finite sum of c * pi^(p/2) * lam^(q/2), c exact in Q(i).

    Terms with equal (p, q) are merged and zero coefficients dropped.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        merged = {}
        for key, c in (terms or {}).items():
            if _is_inexact(c):
                raise ModeError("symbolic coefficients must be exact")
            c = merged.get(key, 0) + c
            merged[key] = c
        self.terms = {k: simplify(c) for k, c in merged.items() if c != 0}

    @classmethod
    def monomial(cls, c=1, p=0, q=0):
        return cls({(p, q): c})

    @staticmethod
    def coerce(x):
        if isinstance(x, MonomialSum):
            return x
        if isinstance(x, (Rational, Gaussian)):
            return MonomialSum({(0, 0): x})
        if _is_inexact(x):
            raise ModeError(f"cannot mix symbolic and float scalars ({x!r})")
        return NotImplemented

    def __add__(self, other):
        o = MonomialSum.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        t = dict(self.terms)
        for k, c in o.terms.items():
            t[k] = t.get(k, 0) + c
        return MonomialSum(t)

    __radd__ = __add__

    def __neg__(self):
        return MonomialSum({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        o = MonomialSum.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = MonomialSum.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = MonomialSum.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        t = {}
        for (p1, q1), c1 in self.terms.items():
            for (p2, q2), c2 in o.terms.items():
                k = (p1 + p2, q1 + q2)
                t[k] = t.get(k, 0) + c1 * c2
        return MonomialSum(t)

    __rmul__ = __mul__

    def inverse(self):
        if len(self.terms) != 1:
            raise ZeroDivisionError("only single monomials are invertible")
        ((p, q), c), = self.terms.items()
        return MonomialSum({(-p, -q): 1 / Gaussian.coerce(c)})

    def __truediv__(self, other):
        o = MonomialSum.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return MonomialSum.coerce(other) * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = MonomialSum({(0, 0): 1})
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if _is_inexact(other):
            return False
        o = MonomialSum.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def lower(self, lam):
        """Numeric value with pi and lam bound to floats."""
        return sum(
            complex(Gaussian.coerce(c)) * math.pi ** (p / 2) * lam ** (q / 2)
            for (p, q), c in self.terms.items()
        ) + 0j

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (p, q), c in sorted(self.terms.items()):
            s = scalar_text(c)
            if p:
                s += f"*pi^({p}/2)"
            if q:
                s += f"*lam^({q}/2)"
            parts.append(s)
        return " + ".join(parts)


PI_HALF = MonomialSum.monomial(1, 1, 0)   # pi^(1/2)
LAM_HALF = MonomialSum.monomial(1, 0, 1)  # lam^(1/2)


def mode_of(x):
    if isinstance(x, MonomialSum):
        return SYMBOLIC
    if isinstance(x, (Gaussian, Rational)):
        return EXACT
    if _is_inexact(x):
        return FLOAT
    raise ModeError(f"unknown scalar type {type(x).__name__}")


def lower(x, lam=1.0):
    """Explicit map from exact/symbolic scalars to complex doubles."""
    if isinstance(x, MonomialSum):
        return x.lower(lam)
    if isinstance(x, Gaussian):
        return complex(x)
    if isinstance(x, Rational):
        return complex(float(x))
    return complex(x)
