"""Sparse exact row reduction over Q(i).

Vectors are ``{key: coeff}`` dicts.  :class:`SubspaceReducer` keeps a reduced
echelon basis of a subspace and maps any vector to its normal form modulo it.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import simplify


def _normal(v):
    return {k: simplify(c) for k, c in v.items() if c != 0}


class SubspaceReducer:
    """Incrementally built echelon basis; ``reduce`` returns canonical coset representatives."""

    def __init__(self, vectors=(), order=None):
        # pivot key -> basis row with coefficient 1 at the pivot
        self.rows = {}
        self._order = order
        for v in vectors:
            self.add(v)

    def _pivot(self, v):
        if self._order is not None:
            return min(v, key=self._order)
        return min(v)

    def reduce(self, v):
        v = _normal(v)
        while True:
            hits = [k for k in v if k in self.rows]
            if not hits:
                return v
            for k in hits:
                c = v.get(k, 0)
                if c == 0:
                    continue
                for kk, r in self.rows[k].items():
                    v[kk] = v.get(kk, 0) - c * r
            v = _normal(v)

    def add(self, v):
        """Add ``v`` to the span; returns True when the dimension grew."""
        v = self.reduce(v)
        if not v:
            return False
        p = self._pivot(v)
        piv = v[p]
        inv = Fraction(1) / piv if isinstance(piv, int) else 1 / piv
        row = _normal({k: c * inv for k, c in v.items()})
        # keep rows fully reduced: clear the new pivot from existing rows
        for q, r in self.rows.items():
            c = r.get(p, 0)
            if c:
                for kk, x in row.items():
                    r[kk] = r.get(kk, 0) - c * x
                self.rows[q] = _normal(r)
        self.rows[p] = row
        return True

    @property
    def dim(self):
        return len(self.rows)

    def contains(self, v):
        return not self.reduce(v)


def solve_in_span(vectors, target):
    """Coefficients ``x`` with ``sum x_i vectors[i] == target`` or ``None``."""
    # track combinations alongside rows by appending tag coordinates
    tagged = []
    for i, v in enumerate(vectors):
        w = dict(v)
        w[("__tag", i)] = 1
        tagged.append(w)
    order = lambda k: (1, k) if isinstance(k, tuple) and k and k[0] == "__tag" else (0, k)
    reducer = SubspaceReducer(order=order)
    for w in tagged:
        reducer.add(w)
    r = reducer.reduce(dict(target))
    if any(not (isinstance(k, tuple) and k and k[0] == "__tag") for k in r):
        return None
    return {k[1]: -c for k, c in r.items()}
