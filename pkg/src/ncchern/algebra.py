"""Finite-dimensional algebras by structure constants, graded matrices, supertraces."""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

import numpy as np

from .errors import BadGrading, BadUnit, DimensionMismatch, NonAssociative, NotSquare, SchemaError
from .scalars import Gaussian, exact, simplify

# index of the adjoined unit in words over the unitalization
UNIT = -1


class FiniteAlgebra:
    """Associative algebra with basis e_0..e_{dim-1} and e_i e_j = sum_k c[i][j][k] e_k.

    Products are stored sparsely: ``table[i, j]`` is a tuple of ``(k, c)`` pairs.
    Instances are immutable once built; use :func:`make_algebra` to construct one.
    """

    __slots__ = ("dim", "basis", "table", "unit", "grading", "_key", "cache")

    def __init__(self, dim, basis, table, unit=None, grading=None):
        self.dim = dim
        self.basis = tuple(basis)
        self.table = table
        self.unit = unit
        self.grading = None if grading is None else tuple(grading)
        # memo tables for word-level operators, keyed by operator name
        self.cache = {}
        self._key = (
            dim,
            self.basis,
            tuple(sorted(table.items())),
            unit,
            self.grading,
        )

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FiniteAlgebra(dim={self.dim}, basis={list(self.basis)})"

    def mul(self, i, j):
        """Product of two basis indices, ``UNIT`` allowed for the adjoined unit."""
        if i == UNIT:
            return ((j, 1),)
        if j == UNIT:
            return ((i, 1),)
        return self.table.get((i, j), ())

    def parity(self, i):
        if i == UNIT or self.grading is None:
            return 0
        return self.grading[i]

    @property
    def is_graded(self):
        return self.grading is not None and any(self.grading)

    @property
    def structure_constants(self):
        c = np.zeros((self.dim, self.dim, self.dim), dtype=object)
        for (i, j), prod in self.table.items():
            for k, v in prod:
                c[i, j, k] = v
        return c

    @property
    def integral(self):
        """True when every structure constant is a rational integer."""
        return all(isinstance(v, int) for prod in self.table.values() for _, v in prod)

    def index(self, label):
        try:
            return self.basis.index(label)
        except ValueError:
            if label in ("1~", "1"):
                return UNIT
            raise

    def label(self, i):
        return "1~" if i == UNIT else self.basis[i]

    def multiply(self, x, y):
        """Product of two elements given as ``{index: coeff}`` dicts."""
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.mul(i, j):
                    out[k] = out.get(k, 0) + a * b * c
        return {k: v for k, v in out.items() if v != 0}


def _dense_to_table(dim, constants):
    table = {}
    if isinstance(constants, dict):
        items = constants.items()
    else:
        arr = np.asarray(constants, dtype=object)
        if arr.shape != (dim, dim, dim):
            raise DimensionMismatch(f"structure constants must have shape {(dim,) * 3}, got {arr.shape}")
        items = (((i, j, k), arr[i, j, k]) for i, j, k in itertools.product(range(dim), repeat=3))
    for (i, j, k), v in items:
        if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
            raise DimensionMismatch(f"index ({i}, {j}, {k}) out of range")
        v = exact(v)
        if v != 0:
            table.setdefault((i, j), {})
            table[i, j][k] = table[i, j].get(k, 0) + v
    return {ij: tuple(sorted((k, simplify(v)) for k, v in d.items() if v != 0)) for ij, d in table.items()}


def _check_associative(alg):
    n = alg.dim
    for i, j, k in itertools.product(range(n), repeat=3):
        left = alg.multiply(alg.multiply({i: 1}, {j: 1}), {k: 1})
        right = alg.multiply({i: 1}, alg.multiply({j: 1}, {k: 1}))
        if left != right:
            raise NonAssociative(i, j, k)


def make_algebra(dim, structure_constants, unit_index=None, grading=None, basis=None):
    """Validated :class:`FiniteAlgebra`.

    ``structure_constants`` is either a dense ``dim x dim x dim`` nested array or a
    dict ``{(i, j, k): c}``.  Associativity is checked on every basis triple.
    """
    if dim < 1:
        raise DimensionMismatch("dim must be positive")
    basis = tuple(basis) if basis is not None else tuple(f"e{i}" for i in range(dim))
    if len(basis) != dim:
        raise DimensionMismatch("basis labels do not match dim")
    table = _dense_to_table(dim, structure_constants)
    if grading is not None:
        grading = tuple(int(g) % 2 for g in grading)
        if len(grading) != dim:
            raise BadGrading("grading length does not match dim")
        for (i, j), prod in table.items():
            for k, _ in prod:
                if grading[k] != (grading[i] + grading[j]) % 2:
                    raise BadGrading(f"product e{i} e{j} has a component of the wrong parity")
    alg = FiniteAlgebra(dim, basis, table, unit_index, grading)
    _check_associative(alg)
    if unit_index is not None:
        if not 0 <= unit_index < dim:
            raise BadUnit(f"unit index {unit_index} out of range")
        if grading is not None and grading[unit_index]:
            raise BadUnit("unit must be even")
        for x in range(dim):
            if alg.multiply({unit_index: 1}, {x: 1}) != {x: 1} or alg.multiply({x: 1}, {unit_index: 1}) != {x: 1}:
                raise BadUnit(f"e{unit_index} is not a two-sided unit (fails on e{x})")
    return alg


def unitalize(alg):
    """Adjoin a new even unit as the last basis vector, even if ``alg`` is unital."""
    n = alg.dim
    table = dict(alg.table)
    for x in range(n + 1):
        table[n, x] = ((x, 1),)
        table[x, n] = ((x, 1),)
    grading = None if alg.grading is None else alg.grading + (0,)
    out = FiniteAlgebra(n + 1, alg.basis + ("1~",), table, n, grading)
    return out


# standard algebras


def complex_numbers(label="e"):
    """The ground field as a one-dimensional unital algebra."""
    return make_algebra(1, {(0, 0, 0): 1}, unit_index=0, basis=[label])


def clifford_one():
    """C_1: basis {1, eps} with eps^2 = 1, eps odd."""
    c = {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 0): 1}
    return make_algebra(2, c, unit_index=0, grading=[0, 1], basis=["1", "eps"])


def matrix_algebra(n=2):
    """M_n by matrix units E_ij E_kl = delta_jk E_il, basis index i*n + j."""
    c = {}
    for i, j, l in itertools.product(range(n), repeat=3):
        c[i * n + j, j * n + l, i * n + l] = 1
    labels = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return make_algebra(n * n, c, basis=labels)


def nilpotent_polynomials(order=3):
    """The non-unital algebra x C[x] / x^order, basis x, x^2, ..., x^(order-1)."""
    dim = order - 1
    c = {}
    for a in range(1, order):
        for b in range(1, order):
            if a + b < order:
                c[a - 1, b - 1, a + b - 1] = 1
    labels = ["x" if k == 1 else f"x^{k}" for k in range(1, order)]
    return make_algebra(dim, c, basis=labels)


def matrix_of_unit(n):
    """Identity of M_n as an element dict."""
    return {i * n + i: 1 for i in range(n)}


# JSON format


def _frac_pair(x):
    x = Fraction(x)
    return x.numerator, x.denominator


def algebra_to_json(alg):
    consts = []
    for (i, j), prod in sorted(alg.table.items()):
        for k, v in prod:
            g = Gaussian.coerce(v)
            consts.append([i, j, k, *_frac_pair(g.re), *_frac_pair(g.im)])
    return {
        "dim": alg.dim,
        "basis": list(alg.basis),
        "constants": consts,
        "unit": alg.unit,
        "grading": None if alg.grading is None else list(alg.grading),
    }


def algebra_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        dim = int(obj["dim"])
        consts = {}
        for row in obj["constants"]:
            i, j, k, rn, rd, imn, imd = row
            v = Gaussian(Fraction(rn, rd), Fraction(imn, imd))
            consts[i, j, k] = consts.get((i, j, k), 0) + v
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed algebra description: {exc}") from exc
    return make_algebra(dim, consts, unit_index=obj.get("unit"), grading=obj.get("grading"), basis=obj.get("basis"))


# graded matrices


class GradedMatrix:
    """Square or rectangular matrix on C^{p|q}: first ``p`` rows/cols even, rest odd.

    ``data`` is a numpy array of dtype ``object`` (exact entries) or ``complex``.
    """

    __slots__ = ("data", "p", "q", "cols")

    def __init__(self, data, p, q=None, parity=None, cols=None):
        data = np.asarray(data)
        if data.ndim != 2:
            raise DimensionMismatch("graded matrix must be 2-dimensional")
        if q is None:
            q = data.shape[0] - p
        self.data = data
        self.p, self.q = p, q
        self.cols = cols if cols is not None else (p, q)
        if data.shape != (p + q, sum(self.cols)):
            raise DimensionMismatch(f"shape {data.shape} does not match grading {p}|{q}")
        if parity is not None and parity != self.parity and not (self.parity == "zero"):
            raise BadGrading(f"declared parity {parity} but blocks are {self.parity}")

    def blocks(self):
        p, cp = self.p, self.cols[0]
        d = self.data
        return d[:p, :cp], d[:p, cp:], d[p:, :cp], d[p:, cp:]

    @property
    def parity(self):
        aa, ab, ba, bb = self.blocks()
        diag = _nonzero(aa) or _nonzero(bb)
        off = _nonzero(ab) or _nonzero(ba)
        if diag and off:
            return "mixed"
        if off:
            return "odd"
        if diag:
            return "even"
        return "zero"

    def __matmul__(self, other):
        return GradedMatrix(self.data.dot(other.data), self.p, self.q, cols=other.cols)

    def __add__(self, other):
        return GradedMatrix(self.data + other.data, self.p, self.q, cols=self.cols)

    def __sub__(self, other):
        return GradedMatrix(self.data - other.data, self.p, self.q, cols=self.cols)

    def __neg__(self):
        return GradedMatrix(-self.data, self.p, self.q, cols=self.cols)

    def scale(self, c):
        return GradedMatrix(self.data * c, self.p, self.q, cols=self.cols)

    @property
    def grading_operator(self):
        n = self.p + self.q
        g = np.zeros((n, n), dtype=self.data.dtype)
        for k in range(n):
            g[k, k] = 1 if k < self.p else -1
        return g


def _nonzero(block):
    return any(x != 0 for x in np.asarray(block).ravel())


def supertrace(m):
    """tr(even-even block) - tr(odd-odd block)."""
    if isinstance(m, GradedMatrix):
        if m.data.shape[0] != m.data.shape[1] or m.cols != (m.p, m.q):
            raise NotSquare("supertrace needs a square graded matrix")
        d, p = m.data, m.p
    else:
        raise TypeError("supertrace expects a GradedMatrix")
    n = d.shape[0]
    total = 0
    for k in range(n):
        total = total + (d[k, k] if k < p else -d[k, k])
    return total


def supercommutator(x, y):
    """[x, y] = xy - (-1)^{|x||y|} yx for homogeneous graded matrices."""
    px = 1 if x.parity == "odd" else 0
    py = 1 if y.parity == "odd" else 0
    sign = -1 if px and py else 1
    return (x @ y) - (y @ x).scale(sign)


def exact_matrix(rows):
    """numpy object array of exact scalars from nested lists."""
    arr = np.array([[exact(v) for v in row] for row in rows], dtype=object)
    return arr
