"""Command line: run invariant suites or compute single results.

    ncchern run-suite --suite bott --report text
    ncchern compute pairing --fixture index1
    ncchern compute ch_idempotent --algebra C --element e=1 --N 4

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import errors
from .algebra import UNIT, algebra_from_json, clifford_one, complex_numbers, matrix_algebra, nilpotent_polynomials
from .bott import bott_chern, pair_bott_dirac
from .fixtures import BIVARIANT, index_fixtures, plain_even, plain_odd
from .forms import NCForm, parse_form
from .scalars import Gaussian, MonomialSum, exact
from .spectral import BivariantChern, SpectralTriple, ch_idempotent, fredholm_index, index_pairing, jlo
from .suites import DEFAULTS, SUITES, Check, SuiteReport, run_suite

SCHEMA_VERSION = 1
MODES = ("exact", "symbolic", "float")
TARGETS = ("ch_idempotent", "jlo", "chi", "pairing", "bott")
INDEX_NAMES = ("index0", "index1", "index2", "index-1", "index-2", "m2-e11", "m2-unit")

BUILTIN_ALGEBRAS = {
    "C": complex_numbers,
    "C1": clifford_one,
    "M2": lambda: matrix_algebra(2),
    "nil3": lambda: nilpotent_polynomials(3),
}


# problem files


@dataclass
class ProblemFile:
    settings: dict = field(default_factory=dict)
    algebras: dict = field(default_factory=dict)
    triples: dict = field(default_factory=dict)
    idempotents: dict = field(default_factory=dict)
    chains: dict = field(default_factory=dict)

    def algebra(self, name):
        if name in self.algebras:
            return self.algebras[name]
        if name in BUILTIN_ALGEBRAS:
            return BUILTIN_ALGEBRAS[name]()
        raise errors.ResolutionError(f"unknown algebra {name!r}")


_SETTINGS = set(DEFAULTS) | {"mode"}


def load_problem(source):
    """Parse and validate a problem file (path, JSON text or dict)."""
    if isinstance(source, (str, Path)) and Path(source).exists():
        obj = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        obj = json.loads(source)
    else:
        obj = dict(source)
    if not isinstance(obj, dict):
        raise errors.SchemaError("problem file must be a JSON object")
    version = obj.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise errors.SchemaError(f"unsupported schema_version {version}")
    unknown = set(obj) - {"schema_version", "settings", "algebras", "triples", "idempotents", "chains"}
    if unknown:
        raise errors.SchemaError(f"unknown top-level keys {sorted(unknown)}")
    settings = dict(obj.get("settings", {}))
    bad = set(settings) - _SETTINGS
    if bad:
        raise errors.SchemaError(f"unknown settings {sorted(bad)}")
    if settings.get("mode", "exact") not in MODES:
        raise errors.SchemaError(f"mode must be one of {MODES}")
    prob = ProblemFile(settings=settings)
    for name, alg in obj.get("algebras", {}).items():
        prob.algebras[name] = algebra_from_json(alg)
    for name, t in obj.get("triples", {}).items():
        if "algebra" not in t:
            raise errors.SchemaError(f"triple {name!r} names no algebra")
        prob.triples[name] = SpectralTriple.from_json(t, prob.algebra(t["algebra"]))
    for name, e in obj.get("idempotents", {}).items():
        A = prob.algebra(e.get("algebra", ""))
        prob.idempotents[name] = (A, _element(A, e.get("element", {})))
    for name, c in obj.get("chains", {}).items():
        A = prob.algebra(c.get("algebra", ""))
        prob.chains[name] = parse_form(A, c.get("text", "0"), int(c.get("trunc", 6)))
    return prob


def _element(A, spec):
    """{label: value} or "a=1,b=2" as an element dict of the unitalization."""
    if isinstance(spec, str):
        pairs = [p.split("=") for p in spec.split(",") if p.strip()]
        spec = {k.strip(): v.strip() for k, v in pairs}
    out = {}
    for label, v in spec.items():
        key = UNIT if label in ("1~", "unit") else A.index(label)
        out[key] = exact(v)
    return out


# rendering


def render(x, mode):
    if isinstance(x, MonomialSum):
        if mode == "float":
            z = x.lower(1.0)
            return [z.real, z.imag]
        return repr(x)
    if isinstance(x, Gaussian) or (isinstance(x, (int,)) and not isinstance(x, bool)) or hasattr(x, "denominator"):
        if mode == "float":
            z = complex(Gaussian.coerce(x))
            return [z.real, z.imag]
        return repr(x) if isinstance(x, Gaussian) else str(x)
    if isinstance(x, (complex, float, np.complexfloating, np.floating)):
        z = complex(x)
        return [z.real, z.imag]
    if isinstance(x, np.ndarray):
        return [[render(v, mode) for v in row] for row in x]
    return x


def _form_table(form, mode):
    lab = form.algebra.label
    rows = []
    for w, c in sorted(form.terms.items(), key=lambda t: (len(t[0]), repr(t[0]))):
        rows.append({"word": [lab(a) for a in w], "coefficient": render(c, mode)})
    return rows


def parse_form_table(algebra, rows, trunc=6):
    """Inverse of the form tables written by ``compute``."""
    terms = {}
    for row in rows:
        w = tuple(UNIT if a == "1~" else algebra.index(a) for a in row["word"])
        c = row["coefficient"]
        terms[w] = complex(*c) if isinstance(c, list) else exact(c)
    return NCForm(algebra, terms, trunc)


def _stamp(timings=None):
    return {
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "timings": timings or {},
    }


# run-suite


def suite_payload(report, cfg, suites):
    timings = {f"{c.suite}/{c.name}": round(c.seconds, 6) for c in report.checks}
    checks = []
    for c in report.checks:
        d = c.to_json()
        d.pop("seconds")
        checks.append(d)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "suite_report",
        "suites": list(suites),
        "settings": {k: cfg[k] for k in sorted(cfg)},
        "passed": report.passed,
        "checks": checks,
        "stamp": _stamp(timings),
    }


def report_from_payload(obj):
    """Rebuild a :class:`SuiteReport` from its JSON payload."""
    timings = obj.get("stamp", {}).get("timings", {})
    checks = []
    for d in obj["checks"]:
        d = dict(d)
        d["seconds"] = timings.get(f"{d['suite']}/{d['name']}", 0.0)
        checks.append(Check(**d))
    return SuiteReport(checks)


def _one_suite(args):
    name, cfg = args
    return run_suite(name, cfg).checks


def _run_suites(names, cfg, jobs):
    if jobs <= 1 or len(names) == 1:
        return SuiteReport([c for n in names for c in run_suite(n, cfg).checks])
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_one_suite, [(n, cfg) for n in names]))
    return SuiteReport([c for part in parts for c in part])


def _config_checks(prob, cfg):
    """Cocycle checks on the triples and chains of a problem file."""
    from .spectral import b_plus_B

    out = []
    for tname, T in prob.triples.items():
        for cname, chain in prob.chains.items():
            if chain.algebra != T.algebra:
                continue
            try:
                v = abs(jlo(T, b_plus_B(chain)))
            except errors.ParityMismatch:
                continue
            status = "pass" if v <= cfg["tol"] else "fail"
            out.append(Check("config", f"JLO (b+B) = 0 on {tname} / {cname}", status, float(v), 1, 0.0))
    return out


def text_report(payload):
    lines = []
    for c in payload["checks"]:
        tag = {"pass": "PASS", "fail": "FAIL"}.get(c["status"], "SKIP")
        lines.append(f"{tag}  [{c['suite']}] {c['name']}  residual={c['residual']:.3g}  n={c['instances']}")
        if c.get("counterexample") and c["status"] == "fail":
            lines.append(f"      counterexample: {c['counterexample']}")
    total = len(payload["checks"])
    ok = sum(c["status"] != "fail" for c in payload["checks"])
    lines.append(f"{ok}/{total} checks passed")
    return "\n".join(lines)


def cmd_run_suite(args):
    prob = load_problem(args.config) if args.config else ProblemFile()
    cfg = dict(DEFAULTS)
    cfg.update({k: v for k, v in prob.settings.items() if k != "mode"})
    for key in ("trunc", "tol", "seed"):
        v = getattr(args, key)
        if v is not None:
            cfg[key] = v
    mode = args.mode or prob.settings.get("mode", "exact")
    names = SUITES if args.suite == "all" else (args.suite,)
    report = _run_suites(list(names), cfg, args.jobs)
    report.checks.extend(_config_checks(prob, cfg))
    payload = suite_payload(report, dict(cfg, mode=mode), names)
    if args.suite in ("bott", "all"):
        payload["bott_pairings"] = {str(n): render(pair_bott_dirac(n), mode) for n in (1, 2, 3, 4)}
    _emit(payload, args, text_report)
    return 0 if report.passed else 1


# compute


def _triple(name, prob, rng):
    if name in prob.triples:
        return prob.triples[name]
    if name == "plain_even":
        return plain_even(rng)
    if name == "plain_odd":
        return plain_odd(rng)
    if name in INDEX_NAMES:
        return index_fixtures(rng)[INDEX_NAMES.index(name)][2]
    raise errors.ResolutionError(f"unknown triple {name!r}")


def _chain(args, prob, algebra):
    if args.chain in prob.chains:
        return prob.chains[args.chain]
    if args.chain is None:
        raise errors.ResolutionError("--chain is required for this target")
    return parse_form(algebra, args.chain, args.trunc or 6)


def compute(target, args, prob=None):
    """Result payload (without stamp) for one compute target."""
    prob = prob or ProblemFile()
    mode = args.mode or prob.settings.get("mode", "exact")
    seed = args.seed if args.seed is not None else prob.settings.get("seed", 0)
    rng = np.random.default_rng(seed)
    out = {"schema_version": SCHEMA_VERSION, "kind": "compute", "target": target, "seed": seed, "mode": mode}
    if target == "ch_idempotent":
        if args.idempotent:
            if args.idempotent not in prob.idempotents:
                raise errors.ResolutionError(f"unknown idempotent {args.idempotent!r}")
            A, e = prob.idempotents[args.idempotent]
        else:
            A = prob.algebra(args.algebra or "C")
            e = _element(A, args.element or "e=1")
        N = args.N if args.N is not None else (args.trunc or 4)
        ch = ch_idempotent(A, e, N, args.picture)
        out["result"] = {"algebra": algebra_name(A), "N": N, "picture": args.picture, "terms": _form_table(ch, mode)}
    elif target == "jlo":
        T = _triple(args.triple or "plain_even", prob, rng)
        chain = _chain(args, prob, T.algebra)
        out["result"] = {"triple": args.triple or "plain_even", "value": render(complex(jlo(T, chain)), mode)}
    elif target == "chi":
        name = args.fixture or "nil_even"
        if name not in BIVARIANT:
            raise errors.ResolutionError(f"unknown bivariant fixture {name!r}")
        T = BIVARIANT[name](rng)
        chain = _chain(args, prob, T.algebra)
        chi = BivariantChern(T)
        c0 = chi.chi0(chain)
        c1 = chi.chi1_form(chain)
        out["result"] = {
            "fixture": name,
            "chi0": _form_table(c0, "float") if isinstance(c0, NCForm) else render(complex(c0), "float"),
            "chi1": _form_table(c1, "float"),
        }
    elif target == "pairing":
        name = args.fixture or args.triple or "index1"
        if name in INDEX_NAMES:
            _, e, T, _ = index_fixtures(rng)[INDEX_NAMES.index(name)]
        else:
            T = _triple(name, prob, rng)
            if not args.idempotent or args.idempotent not in prob.idempotents:
                raise errors.ResolutionError("pairing on a configured triple needs --idempotent")
            e = prob.idempotents[args.idempotent][1]
        t = args.t if args.t is not None else 1.0
        value = index_pairing(e, T, t)
        out["result"] = {"fixture": name, "t": t, "pairing": round(float(value.real), 12), "fredholm_index": fredholm_index(e, T)}
    elif target == "bott":
        ns = [args.n] if args.n else [1, 2, 3, 4]
        rows = {}
        for n in ns:
            ch = bott_chern(n)
            rows[str(n)] = {"pairing": render(pair_bott_dirac(n), mode), "chern": repr(ch)}
        out["result"] = rows
    else:
        raise errors.SchemaError(f"unknown target {target!r}")
    return out


def algebra_name(A):
    for name, make in BUILTIN_ALGEBRAS.items():
        if make() == A:
            return name
    return repr(A)


def _compute_text(payload):
    r = payload["result"]
    t = payload["target"]
    if t == "ch_idempotent":
        lines = [f"ch(e) over {r['algebra']}, {r['picture']} picture, N = {r['N']}"]
        lines += [f"  {row['coefficient']!s:>10}  {' '.join(row['word'])}" for row in r["terms"]]
        return "\n".join(lines)
    if t == "bott":
        return "\n".join(f"n = {n}: pairing {row['pairing']}   ch = {row['chern']}" for n, row in r.items())
    if t == "pairing":
        return f"{r['fixture']}: pairing {r['pairing']} at t = {r['t']}, Fredholm index {r['fredholm_index']}"
    return json.dumps(r, indent=2)


def cmd_compute(args):
    prob = load_problem(args.config) if args.config else ProblemFile()
    payload = compute(args.target, args, prob)
    payload["stamp"] = _stamp()
    _emit(payload, args, _compute_text)
    return 0


# plumbing


def _emit(payload, args, texter):
    body = json.dumps(payload, indent=2, sort_keys=True) if args.report == "json" else texter(payload)
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(body)


def build_parser():
    p = argparse.ArgumentParser(prog="ncchern", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="problem file (JSON)")
        sp.add_argument("--trunc", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--mode", choices=MODES)
        sp.add_argument("--report", choices=("json", "text"), default="text")
        sp.add_argument("--out", help="write the JSON result here")

    rs = sub.add_parser("run-suite", help="run invariant suites")
    common(rs)
    rs.add_argument("--suite", choices=SUITES + ("all",), default="all")
    rs.add_argument("--jobs", type=int, default=1)
    rs.set_defaults(func=cmd_run_suite)

    cp = sub.add_parser("compute", help="compute one result")
    common(cp)
    cp.add_argument("target", choices=TARGETS)
    cp.add_argument("--algebra")
    cp.add_argument("--element", help='e.g. "e=1" or "E11=1,E22=1"')
    cp.add_argument("--idempotent")
    cp.add_argument("--N", type=int)
    cp.add_argument("--picture", choices=("x_complex", "bB"), default="x_complex")
    cp.add_argument("--triple")
    cp.add_argument("--fixture")
    cp.add_argument("--chain", help='chain name or text like "e d[e]"')
    cp.add_argument("--t", type=float)
    cp.add_argument("--n", type=int)
    cp.set_defaults(func=cmd_compute)
    return p


_VALIDATION = (
    errors.SchemaError,
    errors.ResolutionError,
    errors.NonAssociative,
    errors.BadUnit,
    errors.BadGrading,
    errors.DimensionMismatch,
    errors.ParityMismatch,
    errors.NotIdempotent,
    errors.NotHomomorphism,
    errors.ModeError,
    json.JSONDecodeError,
    KeyError,
    ValueError,
)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
