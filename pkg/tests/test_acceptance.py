"""The ten acceptance criteria, each reported as one PASS/FAIL line."""

import time
from functools import lru_cache

from ncchern.suites import DEFAULTS, idempotent_checks, operator_identity_checks, run_suite

from conftest import VERDICTS


@lru_cache(maxsize=None)
def suite(name):
    t = time.perf_counter()
    report = run_suite(name, dict(DEFAULTS))
    return report, time.perf_counter() - t


def checks(name, *prefixes):
    report, _ = suite(name)
    got = [c for c in report.checks if any(c.name.startswith(p) for p in prefixes)]
    assert got, f"no checks matching {prefixes} in suite {name}"
    return got


def verdict(number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}" + (f"  ({detail})" if detail else "")
    print(line)
    VERDICTS.append(line)
    assert ok, line


def summarize(cs):
    worst = max(c.residual for c in cs)
    return all(c.status == "pass" for c in cs), f"{len(cs)} checks, max residual {worst:.2g}"


def test_1_operator_identities():
    t = time.perf_counter()
    res = operator_identity_checks(6)
    dt = time.perf_counter() - t
    ok = all(r == 0 for r in res.values()) and len(res) == 8 and dt < 30
    verdict(1, "operator identities on C, C1, M2, degree <= 6", ok, f"{len(res)} identities, {dt:.1f} s")


def test_2_goodwillie():
    cs = checks("goodwillie", "")
    _, dt = suite("goodwillie")
    ok, detail = summarize(cs)
    ok = ok and all(c.residual == 0 for c in cs) and dt < 120
    ok = ok and all(c.instances >= DEFAULTS["goodwillie_inputs"] for c in cs)
    verdict(2, "Goodwillie maps over M2, 200 inputs", ok, f"{detail}, {dt:.1f} s")


def test_3_bar():
    cs = checks("bar", "")
    ok, detail = summarize(cs)
    ok = ok and all(c.residual == 0 for c in cs)
    ok = ok and all(c.instances >= DEFAULTS["bar_instances"] for c in cs)
    verdict(3, "bar construction and cochain identities, 100 instances", ok, detail)


def test_4_idempotent():
    cs = idempotent_checks()
    ok, detail = summarize(cs)
    ok = ok and len(cs) == 4 and all(c.residual == 0 for c in cs)
    verdict(4, "idempotent lift and its Chern character", ok, detail)


def test_5_jlo_cocycle():
    cs = checks("jlo", "JLO (b+B) = 0")
    ok, detail = summarize(cs)
    ok = ok and len(cs) == 2 and all(c.residual < 1e-9 for c in cs)
    verdict(5, "JLO cocycle, both parities", ok, detail)


def test_6_index_pairing():
    cs = checks("jlo", "index pairing")
    ok, detail = summarize(cs)
    ok = ok and all(c.residual < 1e-9 and c.instances >= 5 for c in cs)
    verdict(6, "index pairing equals Fredholm index", ok, detail)


def test_7_bivariant_chain_map():
    cs = checks("bivariant", "chi chain map")
    ok, detail = summarize(cs)
    ok = ok and all(c.residual < 1e-9 for c in cs)
    verdict(7, "bivariant Chern character is a chain map", ok, detail)


def test_8_homotopy():
    cs = checks("bivariant", "homotopy invariance")
    ok, detail = summarize(cs)
    ok = ok and len(cs) == 2 and all(c.residual < 1e-6 for c in cs)
    verdict(8, "homotopy invariance on two paths, grid 200", ok, detail)


def test_9_bott():
    cs = checks("bott", "<ch(beta_n)", "closed form")
    ok, detail = summarize(cs)
    ok = ok and len(cs) == 2 and all(c.residual == 0 for c in cs)
    verdict(9, "Bott pairing is exactly 1 for n = 1..4, routes agree", ok, detail)


def test_10_duhamel():
    mc = checks("jlo", "block-exponential")
    flat = checks("jlo", "simplex integral with D^2 = 0")
    ok = all(c.status == "pass" for c in mc + flat)
    ok = ok and mc[0].residual < 1e-3 and flat[0].residual < 1e-12
    verdict(10, "simplex integrals vs Monte Carlo and the D^2 = 0 closed form", ok,
            f"MC {mc[0].residual:.2g}, closed form {flat[0].residual:.2g}")
