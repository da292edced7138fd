import copy
import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from nucert.cli import COMMANDS, default_options, dumps, main, run
from nucert.rational import format_fraction, parse_fraction

P2_LINES = {"surface": "P2", "divisors": [{"degree": 1}] * 4}
P2_PROPER = {"surface": "P2", "divisors": [{"coeffs": [1, 0, 0]}, {"coeffs": [0, 1, 0]},
                                           {"coeffs": [0, 0, 1]}, {"degree": 1, "general": True}]}


def test_solve_p2_four_lines():
    doc, code = run(P2_LINES, "solve-multiplicities")
    assert code == 0
    assert doc["certificate"]["m"] == [1, 1, 1, 1]
    assert doc["certificate"]["margins"] == ["1/6"] * 4
    assert doc["certificate"]["assumed_ample"] is False
    assert doc["integer_nu_lower_bounds"] == ["7/6"] * 4


def test_certificate_schema_fields():
    doc, _ = run({"form": [[1, 2], [2, 4]]}, "solve-multiplicities")
    cert = doc["certificate"]
    assert {"r", "m", "denominator", "margins", "residual", "assumed_ample"} <= set(cert)
    assert cert["assumed_ample"] is True and cert["r"] == 2
    assert isinstance(cert["residual"], float)
    assert any("asserted" in a for a in doc["assumptions"])


@pytest.mark.parametrize("command", COMMANDS)
def test_hodge_violation_is_invalid_input(command):
    config = {"form": [[2, 1], [1, 2]]}
    if command == "verify-certificate":
        config = {"input": config, "certificate": {"r": 2, "m": [1, 1], "denominator": 2, "margins": []}}
    doc, code = run(config, command)
    assert code == 1
    assert doc["status"] == "error"
    assert doc["report"]["violations"][0]["kind"] == "hodge"


def test_round_trip_and_determinism():
    for config in (P2_LINES, {"form": [[3, 4, 6], [4, 2, 6], [6, 6, 9]]},
                   {"surface": {"hirzebruch": 1}, "divisors": [{"O": [1, 2]}, {"O": [1, 3]}, {"O": [2, 3]}]}):
        doc, code = run(config, "solve-multiplicities")
        again, _ = run(copy.deepcopy(config), "solve-multiplicities")
        assert code == 0 and dumps(doc) == dumps(again)
        reread = json.loads(dumps(doc))
        out, code = run(reread, "verify-certificate")
        assert code == 0, out
        assert out["verified"]["margins"] == doc["certificate"]["margins"]


def test_verify_rejects_tampered_multiplicity():
    doc, _ = run(P2_LINES, "solve-multiplicities")
    doc = json.loads(dumps(doc))
    doc["certificate"]["m"][0] += 1
    assert run(doc, "verify-certificate")[1] == 3


def test_verify_rejects_tampered_form():
    doc, _ = run({"form": [[3, 4, 6], [4, 2, 6], [6, 6, 9]]}, "solve-multiplicities")
    for i, j, delta in [(0, 0, 1), (1, 2, -1), (2, 2, 1), (0, 1, 1)]:
        bad = json.loads(dumps(doc))
        bad["input"]["form"][i][j] += delta
        assert run(bad, "verify-certificate")[1] in (1, 3)


def test_verify_rejects_forged_margins_and_flags():
    doc, _ = run(P2_LINES, "solve-multiplicities")
    bad = json.loads(dumps(doc))
    bad["certificate"]["margins"][0] = "1/5"
    assert run(bad, "verify-certificate")[1] == 3
    bad = json.loads(dumps(doc))
    bad["certificate"]["assumed_ample"] = True
    assert run(bad, "verify-certificate")[1] == 3
    assert run({"certificate": {}}, "verify-certificate")[1] == 1


def test_exactly_one_input_kind():
    assert run({"form": [[1]], "surface": "P2"}, "nu-bound")[1] == 1
    assert run({}, "nu-bound")[1] == 1
    assert run([1, 2], "nu-bound")[1] == 1


def test_nu_bound_and_oracle():
    doc, code = run({"form": [[1] * 4] * 4}, "nu-bound")
    assert code == 0 and doc["nu_lower_bounds"] == ["7/6"] * 4
    doc, code = run({"surface": "P2", "divisors": [{"degree": 1}], "L": {"degree": 4}}, "nu-bound")
    assert code == 0 and doc["nu_lower_bounds"] == ["7/6"]
    doc, code = run(P2_LINES, "oracle-nu", default_options(n=6, n0=2))
    assert code == 0 and doc["divisors"][0]["truncated_nu"] == "4/3"
    doc, code = run({"curve": {"L": 3, "E": 2}}, "oracle-nu", default_options(n=1000))
    assert code == 0 and doc["exact_nu"] == "3/4"
    assert abs(parse_fraction(doc["truncated_nu"]) - F(3, 4)) <= F(1, 1000)
    assert run({"curve": {"L": 3, "E": 2}}, "nu-bound")[0]["curve_nu"] == "3/4"


def test_proper_check():
    doc, code = run(P2_PROPER, "proper-check")
    assert code == 0 and doc["report"]["proper"] and doc["report"]["assumptions"]
    doc, code = run({"surface": "P2", "divisors": [{"coeffs": [1, 1, 0]}, {"coeffs": [0, 1, 0]}]}, "proper-check")
    assert code == 1 and doc["report"]["failures"] == [{"pair": [1, 2], "shared_components": [1]}]
    assert run({"form": [[1]]}, "proper-check")[1] == 1


def test_adapted_basis_command():
    config = {"surface": "P2", "divisors": [{"coeffs": [1, 0, 0]}, {"coeffs": [0, 1, 0]}],
              "L": {"degree": 1}, "b": 3}
    doc, code = run(config, "adapted-basis")
    assert code == 0 and doc["q"] == 10
    for sums in doc["sums"].values():
        assert sums["mu_sum"] == sums["profile_sum"] == 6 + 3 + 1
    assert all(sum(e["exponents"]) == 3 for e in doc["basis"])


def test_find_b_command():
    doc, code = run(P2_PROPER, "find-b", default_options(epsilon="1/10"))
    assert code == 0 and doc["b"] == 1 and doc["sums"] == [20] * 4
    doc, code = run(P2_PROPER, "find-b", default_options(epsilon="2/5"))
    assert code == 1 and doc["error"]["kind"] == "PreconditionError"
    doc, code = run(P2_PROPER, "find-b")
    assert code == 0 and doc["epsilon"] == "1/12"


def test_search_failure_exit_code():
    config = {"form": [[1, 5], [5, 20]]}
    assert run(config, "solve-multiplicities", default_options(denominator_cap=2))[1] == 3
    assert run(config, "solve-multiplicities", default_options(tolerance=1e-300, max_iter=4))[1] == 2


def test_main_reads_files_and_reports_json_position(tmp_path, capsys):
    good = tmp_path / "p2.json"
    good.write_text(json.dumps(P2_LINES))
    out = tmp_path / "cert.json"
    assert main(["solve-multiplicities", str(good), "--output", str(out)]) == 0
    assert main(["verify-certificate", str(out)]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"form": [[1, 2],\n  [2 4]]}')
    assert main(["nu-bound", str(bad)]) == 1
    assert "line 2 column" in capsys.readouterr().err


@given(st.fractions())
def test_fraction_round_trip(x):
    s = format_fraction(x)
    assert parse_fraction(s) == x
    num, den = s.split("/")
    assert int(den) > 0 and F(int(num), int(den)).denominator == int(den)


def test_parse_fraction_rejects_floats():
    with pytest.raises(ValueError):
        parse_fraction(0.5)
    with pytest.raises(ValueError):
        parse_fraction("1/0")
    assert parse_fraction("3") == 3 and parse_fraction(" -4 / 6 ") == F(-2, 3)
