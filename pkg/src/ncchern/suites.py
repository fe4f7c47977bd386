"""Invariant suites shared by the command line and the acceptance tests.

Each suite is a list of checks; a check returns the worst residual it saw,
how many instances it ran, and the first failing input when there is one.
Exact checks pass only at residual zero.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .algebra import UNIT, clifford_one, complex_numbers, matrix_algebra
from .bar import (
    BarBimodElem,
    BarChain,
    BarCochain,
    MatrixDGA,
    bar_bprime,
    bimod_act,
    bimod_bdprime,
    cochain_from_map,
    coderivation_partial,
    comodule_left,
    comodule_right,
    convolve,
    coproduct,
    cotrace_natural,
    d_R,
    delta_R,
    delta_intertwines_b,
    partial_product_intertwines_B,
    partial_R,
    sigma_flip,
    tensor_apply,
    trace_on_forms,
    unit_cochain,
)
from .bott import bott_chern, collapsed_exp_bott, fedosov_exp_bott, pair_bott_dirac
from .fedosov import fedosov_product, idempotent_e_hat, x_boundary_d
from .fixtures import BIVARIANT, index_fixtures, plain_even, random_chain, random_plain
from .forms import NCForm, _add_into, count_words, hochschild_b, operator_matrix, word_B, word_b, word_d, word_kappa
from .goodwillie import (
    OmegaTAForm,
    TensorLetters,
    b_plus_B,
    connection_nabla,
    gamma,
    homotopy_h,
    natural_one_form,
    one_minus_phi_inv,
    phi_on_forms,
    pi_projection,
    x_tensor_boundary,
)
from .goodwillie import Q as goodwillie_Q
from .simplex import duhamel_integral, simplex_monte_carlo
from .spectral import (
    TriplePath,
    ch_idempotent,
    chain_map_residuals,
    fredholm_index,
    homotopy_residual,
    index_pairing,
    jlo,
)
from .spectral import b_plus_B as spectral_b_plus_B

SUITES = ("identities", "goodwillie", "bar", "jlo", "bivariant", "bott")

DEFAULTS = {
    "seed": 0,
    "trunc": 6,
    "tol": 1e-9,
    "homotopy_tol": 1e-6,
    "grid": 200,
    "goodwillie_inputs": 200,
    "bar_instances": 100,
    "jlo_chains": 100,
    "mc_samples": 10**6,
}


@dataclass
class Check:
    suite: str
    name: str
    status: str
    residual: float
    instances: int
    seconds: float
    counterexample: str | None = None
    skipped: int = 0

    def to_json(self):
        return asdict(self)


@dataclass
class SuiteReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.status != "fail" for c in self.checks)

    def to_json(self):
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _record(suite, name, fn, tol=0.0):
    t0 = time.perf_counter()
    residual, instances, example, skipped = fn()
    status = "pass" if residual <= tol else "fail"
    if instances == 0 and skipped:
        status = "skipped-truncation"
    return Check(suite, name, status, float(residual), instances, time.perf_counter() - t0, example, skipped)


# operator identities


def _nnz(m):
    return 0 if isinstance(m, int) else int(abs(m).max()) if m.nnz else 0


def operator_identity_checks(N=6, algebras=None):
    """Word-operator identities on every basis word of degree <= N."""
    algebras = algebras or [complex_numbers(), clifford_one(), matrix_algebra(2)]
    worst = {}

    def bump(key, v):
        worst[key] = max(worst.get(key, 0), v)

    for A in algebras:
        b = {n: operator_matrix(A, word_b, n, -1) for n in range(1, N + 2)}
        d = {n: operator_matrix(A, word_d, n, 1) for n in range(N + 2)}
        k = {n: operator_matrix(A, word_kappa, n, 0) for n in range(N + 2)}
        B = {n: operator_matrix(A, word_B, n, 1) for n in range(N + 2)}
        for n in range(N + 1):
            I = sp.identity(count_words(A, n), dtype=np.int64, format="csr")
            if n >= 2:
                bump("b^2 = 0", _nnz(b[n - 1] @ b[n]))
            bump("d^2 = 0", _nnz(d[n + 1] @ d[n]))
            bump("B^2 = 0", _nnz(B[n + 1] @ B[n]))
            bump("bB + Bb = 0", _nnz(b[n + 1] @ B[n] + (B[n - 1] @ b[n] if n else 0 * I)))
            db = b[n + 1] @ d[n] + (d[n - 1] @ b[n] if n else 0 * I)
            bump("1 - kappa = db + bd", _nnz(I - k[n] - db))
            bump("kappa B = B", _nnz(k[n + 1] @ B[n] - B[n]))
            bump("B kappa = B", _nnz(B[n] @ k[n] - B[n]))
            kn = I
            for _ in range(n):
                kn = kn @ k[n]
            bump("(kappa^n - 1)(kappa^(n+1) - 1) = 0", _nnz((kn - I) @ (kn @ k[n] - I)))
    return worst


def suite_identities(cfg):
    N = cfg["trunc"]
    checks = []
    t0 = time.perf_counter()
    worst = operator_identity_checks(N)
    per = (time.perf_counter() - t0) / max(len(worst), 1)
    for name, v in worst.items():
        checks.append(Check("identities", f"{name} (C, C1, M2, degree <= {N})", "pass" if v == 0 else "fail", v, 3, per))
    checks.extend(idempotent_checks())
    return checks


def idempotent_checks(N=8, nmax=4):
    out = []

    def square():
        e = idempotent_e_hat(N)
        r = fedosov_product(e, e) - e
        return r.max_abs(), 1, (r.to_text() if r else None), 0

    def closed():
        r = x_boundary_d(idempotent_e_hat(N))
        return r.max_abs(), 1, (r.to_text() if r else None), 0

    def series(picture):
        def run():
            C = complex_numbers()
            ch = ch_idempotent(C, {0: 1}, 2 * nmax, picture)
            worst, bad = 0, None
            for n in range(1, nmax + 1):
                if picture == "x_complex":
                    want = Fraction(math.factorial(2 * n), math.factorial(n) ** 2)
                else:
                    want = Fraction((-1) ** n * math.factorial(2 * n), math.factorial(n))
                w = (0,) * (2 * n + 1)
                got = ch.terms.get(w, 0)
                err = abs(got - want) + abs(ch.terms.get((UNIT,) + w[1:], 0) + want / 2)
                if err and bad is None:
                    bad = f"n={n}: got {got}, want {want}"
                worst = max(worst, float(err))
            return worst, nmax, bad, 0

        return run

    out.append(_record("identities", f"e.e = e (N = {N})", square))
    out.append(_record("identities", f"natural d e = 0 (N = {N})", closed))
    out.append(_record("identities", "ch(e) coefficients (2n)!/(n!)^2, X picture", series("x_complex")))
    out.append(_record("identities", "ch(e) coefficients (-1)^n (2n)!/n!, bB picture", series("bB")))
    return out


# Goodwillie


def _rand_tensor_form(T, deg, total, rng, trunc, nterms=3):
    acc = {}
    for _ in range(nterms):
        while True:
            x0 = () if rng.random() < 0.3 else _rletter(rng, 2)
            xs = [_rletter(rng, 2) for _ in range(deg)]
            if len(x0) + sum(map(len, xs)) <= total:
                break
        acc[(x0 if x0 else UNIT,) + tuple(xs)] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
    return OmegaTAForm(T, acc, trunc)


def _rletter(rng, maxlen):
    return tuple(int(a) for a in rng.integers(0, 4, size=int(rng.integers(1, maxlen + 1))))


def _any_truncated(*forms):
    return any(getattr(f, "truncated", False) for f in forms)


def suite_goodwillie(cfg, length=4):
    rng = np.random.default_rng(cfg["seed"])
    trunc = cfg["trunc"]
    count = cfg["goodwillie_inputs"]
    T = TensorLetters(matrix_algebra(2), length)

    def loop(body):
        def run():
            worst, ran, skipped, bad = 0.0, 0, 0, None
            while ran < count:
                res = body()
                if res is None:
                    skipped += 1
                    if skipped > 20 * count:
                        break
                    continue
                r, text = res
                ran += 1
                v = r.max_abs() if hasattr(r, "max_abs") else float(r)
                if v and bad is None:
                    bad = text
                worst = max(worst, v)
            return worst, ran, bad, skipped

        return run

    def nabla_b():
        deg = int(rng.integers(2, 4))
        w = _rand_tensor_form(T, deg, length, rng, trunc)
        nb, bn = connection_nabla(hochschild_b(w)), hochschild_b(connection_nabla(w))
        if _any_truncated(nb, bn):
            return None
        return nb + bn + w, w.to_text()

    def phi_nilpotent():
        deg = int(rng.integers(0, 4))
        w = _rand_tensor_form(T, deg, length, rng, trunc)
        # phi keeps the tensor length and raises the degree by 2; it dies after length steps
        x = w
        for _ in range(length):
            x = phi_on_forms(x)
        if x.truncated:
            return None
        return x, w.to_text()

    def intertwine():
        deg = int(rng.integers(1, 4))
        w = _rand_tensor_form(T, deg, length, rng, trunc)
        lhs = b_plus_B(one_minus_phi_inv(w))
        rhs = one_minus_phi_inv(hochschild_b(w))
        if _any_truncated(lhs, rhs):
            return None
        return lhs - rhs, w.to_text()

    def chain_map():
        x = _rand_tensor_form(T, 0, length, rng, trunc)
        y = _rand_tensor_form(T, 1, length, rng, trunc)
        bo, be = x_tensor_boundary(x, y)
        lhs, rhs = b_plus_B(gamma(x, y)), gamma(bo, be)
        if _any_truncated(lhs, rhs):
            return None
        return lhs - rhs, f"x = {x.to_text()}; y = {y.to_text()}"

    def pi_gamma():
        x = _rand_tensor_form(T, 0, length, rng, trunc)
        y = _rand_tensor_form(T, 1, length, rng, trunc)
        g = gamma(x, y)
        if g.truncated:
            return None
        e, o = pi_projection(g)
        return (e - x) + (o - natural_one_form(y)), f"x = {x.to_text()}; y = {y.to_text()}"

    def homotopy():
        w = _rand_tensor_form(T, int(rng.integers(0, 4)), length, rng, trunc)
        h, bb = homotopy_h(w), b_plus_B(w)
        hb = homotopy_h(bb)
        q = goodwillie_Q(w)
        if _any_truncated(h, bb, hb, q):
            return None
        return q - w - b_plus_B(h) - hb, w.to_text()

    names = [
        ("nabla b + b nabla = -Id (degree >= 2)", nabla_b),
        (f"phi^{length} = 0 at tensor length {length}", phi_nilpotent),
        ("(b+B)(1-phi)^-1 = (1-phi)^-1 b", intertwine),
        ("gamma is a chain map", chain_map),
        ("pi gamma = Id", pi_gamma),
        ("gamma pi - Id = [b+B, h]", homotopy),
    ]
    return [_record("goodwillie", name, loop(body)) for name, body in names]


# bar construction


def _bar_fixture(rng):
    A = matrix_algebra(2)
    delta = np.zeros((4, 4), dtype=object)
    delta[2, 0], delta[3, 1], delta[2, 1] = 1, 2, -1
    return A, MatrixDGA(2, 2, delta)


def _rmat(rng, par):
    m = np.zeros((4, 4), dtype=object)
    for i in range(4):
        for j in range(4):
            if ((i >= 2) != (j >= 2)) == bool(par):
                m[i, j] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    return m


def _letters(unit=True):
    return list(range(4)) + ([UNIT] if unit else [])


def _rword(rng, n, unit=True):
    L = _letters(unit)
    return tuple(L[int(i)] for i in rng.integers(0, len(L), size=n))


def _rcochain(rng, T, par, lens, unit=True, bim=False, n_bar=6):
    tab = {}
    for n in lens:
        for _ in range(3):
            w = _rword(rng, n, unit)
            if bim:
                if n == 0:
                    continue
                i = int(rng.integers(0, n))
                w = (w[:i], w[i], w[i + 1:])
            tab[w] = _rmat(rng, (par + n) % 2)
    return BarCochain(T, par, tab, n_bar, bim)


def _rform(rng, A, n, trunc=6):
    terms = {}
    for _ in range(2):
        w = (_rword(rng, 1)[0],) + _rword(rng, n, False)
        terms[w] = terms.get(w, 0) + 1
    return NCForm(A, terms, trunc)


def suite_bar(cfg):
    rng = np.random.default_rng(cfg["seed"] + 1)
    count = cfg["bar_instances"]
    n_bar = 6
    A, T = _bar_fixture(rng)
    dl = lambda f: delta_R(f, A)  # noqa: E731

    def chain(n):
        return BarChain(A, {_rword(rng, n): int(rng.integers(-3, 4)) for _ in range(3)}, n_bar)

    def elem(n):
        acc = {}
        for _ in range(3):
            w = _rword(rng, n)
            i = int(rng.integers(0, n))
            acc[(w[:i], w[i], w[i + 1:])] = int(rng.integers(-3, 4))
        return BarBimodElem(A, acc, n_bar)

    def counted(pred):
        def run():
            bad, first = 0, None
            for _ in range(count):
                ok, text = pred()
                if not ok:
                    bad += 1
                    first = first or text
            return bad, count, first, 0

        return run

    def bprime_sq():
        c = chain(int(rng.integers(0, n_bar + 1)))
        return not bar_bprime(bar_bprime(c)), repr(c)

    def bdprime_sq():
        e = elem(int(rng.integers(1, n_bar + 1)))
        return not bimod_bdprime(bimod_bdprime(e)), repr(e)

    def partial_chain():
        e = elem(int(rng.integers(1, n_bar + 1)))
        return coderivation_partial(bimod_bdprime(e)) == bar_bprime(coderivation_partial(e)), repr(e)

    def coassoc():
        c = chain(int(rng.integers(0, n_bar + 1)))
        left, right = {}, {}
        for (x, y), v in coproduct(c).items():
            for (x1, x2), u in coproduct(BarChain(A, {x: 1}, n_bar)).items():
                _add_into(left, (x1, x2, y), u * v)
            for (y1, y2), u in coproduct(BarChain(A, {y: 1}, n_bar)).items():
                _add_into(right, (x, y1, y2), u * v)
        return left == right, repr(c)

    def coderivation():
        c = chain(int(rng.integers(0, n_bar + 1)))

        def bp(w):
            return bar_bprime(BarChain(A, {w: 1}, n_bar)).terms

        tot = dict(tensor_apply(coproduct(c), left=bp))
        for k, v in tensor_apply(coproduct(c), right=bp, right_deg=1).items():
            _add_into(tot, k, v)
        return coproduct(bar_bprime(c)) == tot, repr(c)

    def cotrace_b():
        n = int(rng.integers(0, n_bar - 1))
        w = _rform(rng, A, n)
        return cotrace_natural(hochschild_b(w), n_bar) == bimod_bdprime(cotrace_natural(w, n_bar)), w.to_text()

    def cotrace_flip():
        n = int(rng.integers(0, n_bar))
        nat = cotrace_natural(_rform(rng, A, n), n_bar)
        ok = comodule_left(nat) == sigma_flip(comodule_right(nat)) and sigma_flip(comodule_left(nat)) == comodule_right(nat)
        return ok, repr(nat)

    def r_algebra():
        pf, pg, ph = (int(x) for x in rng.integers(0, 2, size=3))
        f, g, h = _rcochain(rng, T, pf, [1, 2]), _rcochain(rng, T, pg, [0, 1, 2]), _rcochain(rng, T, ph, [1, 2])
        one = unit_cochain(T)
        s = (-1) ** pf
        ok = convolve(convolve(f, g), h) == convolve(f, convolve(g, h))
        ok &= convolve(one, f) == f and convolve(f, one) == f
        ok &= dl(convolve(f, g)) == convolve(dl(f), g) + s * convolve(f, dl(g))
        ok &= d_R(convolve(f, g)) == convolve(d_R(f), g) + s * convolve(f, d_R(g))
        ok &= not dl(dl(f)) and not d_R(d_R(f)) and not (dl(d_R(f)) + d_R(dl(f)))
        return ok, f"{f!r}; {g!r}; {h!r}"

    def bimodule():
        pf = int(rng.integers(0, 2))
        f, g = _rcochain(rng, T, pf, [1, 2]), _rcochain(rng, T, int(rng.integers(0, 2)), [1, 2])
        gm = _rcochain(rng, T, int(rng.integers(0, 2)), [1, 2, 3], bim=True)
        s = (-1) ** pf
        ok = not dl(dl(gm))
        ok &= dl(bimod_act(f, gm, "left")) == bimod_act(dl(f), gm, "left") + s * bimod_act(f, dl(gm), "left")
        ok &= partial_R(convolve(f, g)) == bimod_act(g, partial_R(f), "right") + bimod_act(f, partial_R(g), "left")
        ok &= partial_R(dl(f)) == dl(partial_R(f))
        w = _rform(rng, A, int(rng.integers(0, 5)))
        lhs = trace_on_forms(bimod_act(f, gm, "right"), w)
        rhs = (-1) ** (gm.parity * pf) * trace_on_forms(bimod_act(f, gm, "left"), w)
        ok &= lhs == rhs
        return ok, f"{f!r}; {gm!r}"

    def delta_vs_b():
        gm = _rcochain(rng, T, int(rng.integers(0, 2)), [1, 2, 3], bim=True)
        w = _rform(rng, A, int(rng.integers(0, 5)))
        return delta_intertwines_b(gm, w), f"{gm!r}; {w.to_text()}"

    def partial_vs_B():
        pf, pg = (int(x) for x in rng.integers(0, 2, size=2))
        rho = {a: _rmat(rng, 0) for a in range(4)}
        rho[UNIT] = T.unit
        r = cochain_from_map(T, rho)
        f, g = _rcochain(rng, T, pf, [1, 2], unit=False), _rcochain(rng, T, pg, [1, 2], unit=False)
        w = _rform(rng, A, int(rng.integers(0, 5)))
        return partial_product_intertwines_B(f, g, r, w), f"{f!r}; {g!r}; {w.to_text()}"

    names = [
        ("b'^2 = 0", bprime_sq),
        ("b''^2 = 0", bdprime_sq),
        ("partial b'' = b' partial", partial_chain),
        ("coassociativity", coassoc),
        ("b' is a coderivation", coderivation),
        ("natural b = b'' natural", cotrace_b),
        ("cotrace: Delta_l = sigma Delta_r", cotrace_flip),
        ("R-algebra axioms", r_algebra),
        ("bimodule and trace identities", bimodule),
        ("delta gam natural = -(-1)^|gam| gam natural b", delta_vs_b),
        ("partial(fg) natural = (-1)^|g| f (partial rho) g natural B", partial_vs_B),
    ]
    return [_record("bar", name, counted(body)) for name, body in names]


# JLO, index pairing, simplex integrals


def suite_jlo(cfg):
    rng = np.random.default_rng(cfg["seed"] + 2)
    tol = cfg["tol"]
    A = matrix_algebra(2)
    checks = []

    def cocycle(parity):
        def run():
            worst, bad = 0.0, None
            for _ in range(cfg["jlo_chains"] // 2):
                T = random_plain(rng, parity)
                degs = [1, 3] if parity == "even" else [0, 2, 4]
                c = random_chain(A, degs, rng, trunc=6)
                v = abs(jlo(T, spectral_b_plus_B(c)))
                if v > tol and bad is None:
                    bad = f"dim {T.dim}: {c.to_text()}"
                worst = max(worst, v)
            return worst, cfg["jlo_chains"] // 2, bad, 0

        return run

    checks.append(_record("jlo", "JLO (b+B) = 0, even triples", cocycle("even"), tol))
    checks.append(_record("jlo", "JLO (b+B) = 0, odd triples", cocycle("odd"), tol))

    def pairing():
        worst, bad = 0.0, None
        fx = index_fixtures(np.random.default_rng(cfg["seed"]))
        for name, e, T, want in fx:
            exact_index = fredholm_index(e, T)
            errs = [abs(index_pairing(e, T, t) - exact_index) for t in (0.5, 1.0, 2.0)]
            err = max(errs + [abs(exact_index - want)])
            if err > tol and bad is None:
                bad = name
            worst = max(worst, err)
        return worst, len(fx), bad, 0

    checks.append(_record("jlo", "index pairing = Fredholm index, t in {0.5, 1, 2}", pairing, tol))

    def duhamel_mc():
        worst = 0.0
        for n in (1, 2, 3):
            d = 4 if n < 3 else 3
            D2, facs = _duhamel_data(rng, d, n)
            exact = duhamel_integral(D2, facs)
            mc = simplex_monte_carlo(D2, facs, samples=cfg["mc_samples"], seed=cfg["seed"] + n)
            worst = max(worst, float(np.abs(exact - mc).max()))
        return worst, 3, None, 0

    def duhamel_nil():
        worst = 0.0
        for n in (1, 2, 3):
            d = 4
            facs = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(n)]
            closed = np.linalg.multi_dot([np.eye(d)] + facs) / math.factorial(n)
            worst = max(worst, float(np.abs(duhamel_integral(np.zeros((d, d)), facs) - closed).max()))
        return worst, 3, None, 0

    checks.append(_record("jlo", "block-exponential simplex integral vs Monte Carlo", duhamel_mc, 1e-3))
    checks.append(_record("jlo", "simplex integral with D^2 = 0 vs A1...An/n!", duhamel_nil, 1e-12))
    return checks


def _duhamel_data(rng, d, n):
    X = rng.normal(size=(d, d)) * 0.5
    D2 = X @ X.T
    facs = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(n)]
    return D2, facs


# bivariant Chern character


def suite_bivariant(cfg):
    rng = np.random.default_rng(cfg["seed"] + 3)
    tol = cfg["tol"]
    checks = []
    for name, make in BIVARIANT.items():

        def run(make=make, name=name):
            T = make(rng)
            worst, bad = 0.0, None
            for _ in range(4):
                c = random_chain(T.algebra, [0, 1, 2, 3], rng, nterms=4)
                r0, r1 = chain_map_residuals(T, c)
                v = max(r0.max_abs(), max((abs(x) for x in r1.terms.values()), default=0.0))
                if v > tol and bad is None:
                    bad = c.to_text()
                worst = max(worst, v)
            return worst, 4, bad, 0

        checks.append(_record("bivariant", f"chi chain map, {name}", run, tol))
    for name, run in homotopy_paths(cfg, rng).items():
        checks.append(_record("bivariant", f"homotopy invariance, {name}", run, cfg["homotopy_tol"]))
    return checks


def homotopy_paths(cfg, rng):
    """Two fixture paths: a linear path of plain triples and a bivariant conjugation path."""
    grid = cfg["grid"]
    A = matrix_algebra(2)

    def plain():
        T = plain_even(rng)
        D1 = np.zeros((4, 4), complex)
        D1[:2, 2:] = rng.normal(size=(2, 2))
        D1[2:, :2] = D1[:2, 2:].conj().T
        path = TriplePath.linear(T, D1)
        worst = 0.0
        for deg in (1, 3):
            worst = max(worst, homotopy_residual(path, random_chain(A, [deg], rng, nterms=2), grid))
        return worst, 2, None, 0

    def bivariant():
        T = BIVARIANT["nil_even"](rng)
        X = np.zeros((4, 4))
        X[:2, :2] = rng.normal(size=(2, 2)) * 0.2
        X[2:, 2:] = rng.normal(size=(2, 2)) * 0.2
        D1 = T.D._like(
            {w: np.block([[np.zeros((2, 2)), rng.normal(size=(2, 2)) * 0.2], [rng.normal(size=(2, 2)) * 0.2, np.zeros((2, 2))]])
             for w in T.D.terms}
        )
        path = TriplePath.conjugation(T, X, D1)
        worst = 0.0
        for deg in (0, 1):
            worst = max(worst, homotopy_residual(path, random_chain(A, [deg], rng, nterms=2), grid))
        return worst, 2, None, 0

    return {"linear path of plain triples": plain, "conjugation path over C[x]/x^3": bivariant}


# Bott


def bott_table(ns=(1, 2, 3, 4)):
    return {n: pair_bott_dirac(n) for n in ns}


def suite_bott(cfg):
    def pairing():
        worst, bad = 0, None
        for n in (1, 2, 3, 4):
            for method in ("closed_form", "fedosov_exp"):
                v = pair_bott_dirac(n, method)
                if v != 1:
                    worst = 1
                    bad = bad or f"n={n} {method}: {v!r}"
        return worst, 8, bad, 0

    def agree():
        bad = None
        for n in (1, 2, 3, 4):
            a, b = bott_chern(n), bott_chern(n, "fedosov_exp")
            same = a == b if n % 2 == 0 else a.normal_form() == b.normal_form()
            if not same:
                bad = bad or f"n={n}"
        return int(bad is not None), 4, bad, 0

    def collapse():
        bad = None
        for n in (1, 2, 3, 4):
            _, _, F = fedosov_exp_bott(n)
            if (F - collapsed_exp_bott(n)).terms:
                bad = bad or f"n={n}"
        return int(bad is not None), 4, bad, 0

    return [
        _record("bott", "<ch(beta_n), ch(Dirac)> = 1, n = 1..4, both routes", pairing),
        _record("bott", "closed form = Fedosov exponential route", agree),
        _record("bott", "Duhamel series = e^{-D^2} sum (-1)^k/k! (dD dD)^k", collapse),
    ]


RUNNERS = {
    "identities": suite_identities,
    "goodwillie": suite_goodwillie,
    "bar": suite_bar,
    "jlo": suite_jlo,
    "bivariant": suite_bivariant,
    "bott": suite_bott,
}


def run_suite(suite="all", config=None):
    cfg = dict(DEFAULTS)
    cfg.update(config or {})
    names = SUITES if suite == "all" else (suite,)
    report = SuiteReport()
    for name in names:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
        report.checks.extend(RUNNERS[name](cfg))
    return report


__all__ = ["Check", "SuiteReport", "SUITES", "DEFAULTS", "run_suite", "bott_table", "operator_identity_checks"]
