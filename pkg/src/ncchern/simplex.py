"""Heat kernels and ordered exponential integrals over simplices.

``duhamel_integral(D2, [A1, ..., An], t)`` is

    int_{s0 + ... + sn = t} e^{-s0 D2} A1 e^{-s1 D2} ... An e^{-sn D2} ds1 ... dsn

computed from a single exponential of an (n+1)-block upper-bidiagonal matrix.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NegativeTime


def _is_exact(m):
    return isinstance(m, np.ndarray) and m.dtype == object


def _all_zero(m):
    return not any(x != 0 for x in np.asarray(m).ravel())


def heat_kernel(D, t):
    """exp(-t D^2) for a square matrix (or GradedMatrix) ``D``."""
    if t < 0:
        raise NegativeTime(f"heat kernel needs t >= 0, got {t}")
    data = getattr(D, "data", D)
    data = np.asarray(data, dtype=complex)
    out = scipy.linalg.expm(-t * (data @ data))
    if hasattr(D, "p"):
        from .algebra import GradedMatrix

        return GradedMatrix(out, D.p, D.q)
    return out


def duhamel_integral(D2, factors, t=1.0):
    """Ordered simplex integral with heat factors exp(-s D2) between the ``factors``."""
    D2 = np.asarray(getattr(D2, "data", D2))
    if D2.ndim != 2 or D2.shape[0] != D2.shape[1]:
        raise DimensionMismatch("D2 must be square")
    d = D2.shape[0]
    mats = [np.asarray(getattr(a, "data", a)) for a in factors]
    for a in mats:
        if a.shape != (d, d):
            raise DimensionMismatch(f"factor of shape {a.shape} does not match {d}x{d}")
    n = len(mats)
    if _all_zero(D2):
        # constant integrand: simplex volume t^n / n!
        out = np.eye(d, dtype=object if _is_exact(D2) else complex)
        for a in mats:
            out = out.dot(a)
        if _is_exact(out) and (isinstance(t, int) or _is_exact(D2)):
            from fractions import Fraction

            return out * (Fraction(t) ** n / math.factorial(n))
        return np.asarray(out, dtype=complex) * (t**n / math.factorial(n))
    if _is_exact(D2):
        D2 = D2.astype(complex)
    if n == 0:
        return scipy.linalg.expm(-t * D2.astype(complex))
    big = np.zeros(((n + 1) * d, (n + 1) * d), dtype=complex)
    for k in range(n + 1):
        big[k * d:(k + 1) * d, k * d:(k + 1) * d] = -D2
    for k, a in enumerate(mats):
        big[k * d:(k + 1) * d, (k + 1) * d:(k + 2) * d] = a
    e = scipy.linalg.expm(t * big)
    return e[:d, n * d:]


def simplex_monte_carlo(D2, factors, t=1.0, samples=10**6, seed=0, batch=20000):
    """Monte-Carlo estimate of :func:`duhamel_integral` (oracle for tests)."""
    rng = np.random.default_rng(seed)
    D2 = np.asarray(D2, dtype=complex)
    mats = [np.asarray(a, dtype=complex) for a in factors]
    n = len(mats)
    w, v = np.linalg.eig(D2)
    vinv = np.linalg.inv(v)
    d = D2.shape[0]
    total = np.zeros((d, d), dtype=complex)
    done = 0
    vol = t**n / math.factorial(n)
    while done < samples:
        m = min(batch, samples - done)
        s = rng.dirichlet(np.ones(n + 1), size=m) * t
        # e^{-s D2} = V diag(e^{-s w}) V^{-1}, batched
        heats = v[None, None] * np.exp(-s[:, :, None] * w[None, None, :])[:, :, None, :]
        heats = heats @ vinv[None, None]
        acc = heats[:, 0]
        for k, a in enumerate(mats):
            acc = acc @ a @ heats[:, k + 1]
        total += acc.sum(axis=0)
        done += m
    return total / samples * vol
