import json

import numpy as np
import pytest

from ncchern import errors
from ncchern.algebra import algebra_to_json, matrix_algebra
from ncchern.cli import load_problem, main, parse_form_table, report_from_payload
from ncchern.fixtures import plain_even
from ncchern.forms import parse_form


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_unknown_top_level_key():
    with pytest.raises(errors.SchemaError):
        load_problem({"frobnicate": 1})


def test_bad_schema_version():
    with pytest.raises(errors.SchemaError):
        load_problem({"schema_version": 7})


def test_unknown_setting_and_mode():
    with pytest.raises(errors.SchemaError):
        load_problem({"settings": {"speed": 3}})
    with pytest.raises(errors.SchemaError):
        load_problem({"settings": {"mode": "fuzzy"}})


def test_unknown_algebra_reference():
    with pytest.raises(errors.ResolutionError):
        load_problem({"idempotents": {"e": {"algebra": "Q8", "element": "e=1"}}})


def test_triple_round_trip_through_problem_file():
    T = plain_even(np.random.default_rng(0))
    prob = load_problem({"algebras": {"A": algebra_to_json(T.algebra)}, "triples": {"t": dict(T.to_json(), algebra="A")}})
    S = prob.triples["t"]
    assert np.allclose(S.D, T.D)
    assert set(S.rho) == set(T.rho)


def test_nonassociative_config_exits_2(tmp_path, capsys):
    # (e0 e0) e0 = e0 but e0 (e0 e0) = 0
    bad = {"dim": 2, "constants": [[0, 0, 1, 1, 1, 0, 1], [1, 0, 0, 1, 1, 0, 1]]}
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"algebras": {"bad": bad}}))
    code, _, err = run(["run-suite", "--suite", "bott", "--config", str(path)], capsys)
    assert code == 2
    assert "NonAssociative" in err


def test_schema_error_exits_2(tmp_path, capsys):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"nope": 1}))
    code, _, err = run(["compute", "bott", "--config", str(path)], capsys)
    assert code == 2 and "SchemaError" in err


def test_run_suite_bott_passes(capsys):
    code, out, _ = run(["run-suite", "--suite", "bott"], capsys)
    assert code == 0
    assert "FAIL" not in out
    assert out.strip().splitlines()[-1].endswith("checks passed")


def test_json_report_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["run-suite", "--suite", "bott", "--report", "json", "--out", str(p)]) == 0
    capsys.readouterr()
    x, y = json.loads(a.read_text()), json.loads(b.read_text())
    x.pop("stamp")
    y.pop("stamp")
    assert x == y
    assert x["bott_pairings"]["2"] == "1"


def test_report_payload_round_trip(tmp_path, capsys):
    p = tmp_path / "r.json"
    main(["run-suite", "--suite", "bott", "--report", "json", "--out", str(p)])
    capsys.readouterr()
    obj = json.loads(p.read_text())
    rep = report_from_payload(obj)
    assert rep.passed == obj["passed"]
    assert [c.name for c in rep.checks] == [c["name"] for c in obj["checks"]]


def test_compute_pairing_index1(capsys):
    code, out, _ = run(["compute", "pairing", "--fixture", "index1", "--report", "json"], capsys)
    assert code == 0
    r = json.loads(out)["result"]
    assert r["pairing"] == pytest.approx(1.0, abs=1e-9)
    assert r["fredholm_index"] == 1


@pytest.mark.parametrize("name,index", [("index0", 0), ("index2", 2), ("index-1", -1)])
def test_compute_pairing_fixtures(name, index, capsys):
    code, out, _ = run(["compute", "pairing", "--fixture", name, "--report", "json"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["pairing"] == pytest.approx(index, abs=1e-9)


def test_compute_ch_idempotent_table_round_trip(capsys):
    code, out, _ = run(["compute", "ch_idempotent", "--algebra", "C", "--element", "e=1", "--N", "4", "--report", "json"], capsys)
    assert code == 0
    r = json.loads(out)["result"]
    assert r["algebra"] == "C" and r["N"] == 4
    from ncchern.algebra import complex_numbers
    from ncchern.spectral import ch_idempotent

    A = complex_numbers()
    back = parse_form_table(A, r["terms"], 4)
    assert back == ch_idempotent(A, {A.index("e"): 1}, 4, "x_complex")


def test_compute_ch_text(capsys):
    code, out, _ = run(["compute", "ch_idempotent", "--algebra", "M2", "--element", "E11=1", "--N", "2"], capsys)
    assert code == 0
    assert out.startswith("ch(e) over M2")


def test_compute_bott_exact(capsys):
    code, out, _ = run(["compute", "bott", "--n", "3", "--report", "json"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["3"]["pairing"] == "1"


def test_compute_jlo_parity_mismatch_exits_2(capsys):
    code, _, err = run(["compute", "jlo", "--triple", "plain_even", "--chain", "E11 d[E12]"], capsys)
    assert code == 2
    assert "ParityMismatch" in err


def test_unknown_fixture_exits_2(capsys):
    code, _, err = run(["compute", "chi", "--fixture", "nowhere", "--chain", "e"], capsys)
    assert code == 2 and "ResolutionError" in err


def test_config_chain_cocycle_check(tmp_path, capsys):
    T = plain_even(np.random.default_rng(0))
    A = T.algebra
    lab = A.label(0)
    path = tmp_path / "p.json"
    path.write_text(json.dumps({
        "algebras": {"A": algebra_to_json(A)},
        "triples": {"t": dict(T.to_json(), algebra="A")},
        "chains": {"c": {"algebra": "A", "text": f"{lab} d[{lab}]"}},
    }))
    code, out, _ = run(["run-suite", "--suite", "bott", "--config", str(path)], capsys)
    assert code == 0
    assert "[config]" in out


def test_parse_form_table_floats():
    A = matrix_algebra(2)
    f = parse_form_table(A, [{"word": ["E12", "E21"], "coefficient": [0.5, -1.0]}])
    assert f.terms == {(A.index("E12"), A.index("E21")): complex(0.5, -1.0)}


def test_parse_form_table_exact():
    A = matrix_algebra(2)
    f = parse_form_table(A, [{"word": ["1~", "E21"], "coefficient": "3/2"}])
    assert f == parse_form(A, "3/2*d[E21]", 6)
