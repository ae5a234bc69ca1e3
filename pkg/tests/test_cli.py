import json
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
from click.testing import CliRunner

from triplel.algebra import ExactScalar
from triplel.cli import (EulerCache, LValueConfig, NewformSchemaError, deligne_ok, ingest_newform, main,
                         parse_newform, run_lvalue, tail_bound, triple_factor)

DATA = Path(__file__).resolve().parent.parent / "data"
BASE = {"label": "t", "k": 2, "N": 11, "chi": "trivial", "ap": [[2, -2], [3, -1]]}


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


@pytest.mark.parametrize("patch,message", [
    ({"ap": [[4, 1]]}, "not prime"),
    ({"ap": [[11, 1]]}, "divides the level"),
    ({"ap": [[2, 1], [2, 1]]}, "duplicate"),
    ({"k": "2"}, "integer"),
    ({"chi": {"modulus": 11, "values": [[1, 1], [2, 2]]}}, r"\+1 or -1"),
    ({"chi": {"modulus": 5, "values": []}}, "must divide"),
    ({"ap": []}, "nonempty"),
])
def test_schema_errors(patch, message):
    with pytest.raises(NewformSchemaError, match=message):
        parse_newform({**BASE, **patch})


def test_missing_field():
    doc = dict(BASE)
    del doc["ap"]
    with pytest.raises(NewformSchemaError, match="missing"):
        parse_newform(doc)


def test_deligne_warning():
    with pytest.warns(UserWarning, match="Deligne"):
        parse_newform({**BASE, "ap": [[2, 3]]})
    assert deligne_ok(Fraction(-2), 2, 2) and not deligne_ok(Fraction(3), 2, 2)


@pytest.mark.parametrize("name,label,n_primes", [("11a.json", "11a", 45), ("delta.json", "delta", 46)])
def test_bundled_newforms(name, label, n_primes):
    f = ingest_newform(DATA / name)
    assert f.label == label and len(f.ap) == n_primes


def test_cache_roundtrip(tmp_path):
    f = ingest_newform(DATA / "11a.json")
    path = tmp_path / "euler.json"
    cache = EulerCache(path)
    a = triple_factor([f] * 3, 3, cache)
    cache.flush()
    again = EulerCache(path)
    assert triple_factor([f] * 3, 3, again) == a and again.hits == 1
    assert not list(tmp_path.glob("*.tmp"))


def test_tail_bound_domain():
    assert tail_bound(50, Fraction(2)) > 0
    with pytest.raises(ValueError):
        tail_bound(50, Fraction(3, 2))


def test_lvalue_is_deterministic_and_stable():
    f = ingest_newform(DATA / "11a.json")
    r1 = run_lvalue([f], LValueConfig(Fraction(2), 30, 96))
    r2 = run_lvalue([f], LValueConfig(Fraction(2), 30, 96))
    assert r1.ok and r1.data == r2.data
    assert r1.data["ks_ok"] and r1.data["doubling_stable"]
    assert mpmath.mpf(r1.data["value"]) > 0


def test_lfactor_command():
    res = run("lfactor", "--satake", "1,2;1,3;1,5", "--q", 3, "--json")
    assert res.exit_code == 0
    assert json.loads(res.output)["degree"] == 8


def test_critical_command():
    res = run("critical", "--kappa", "4,4,4")
    assert res.exit_code == 0 and "{-1/2, 1/2, 3/2}" in res.output


def test_goodplaces_command():
    res = run("goodplaces", "--samples", 200, "--json")
    data = json.loads(res.output)
    assert res.exit_code == 0 and data["mismatches"] == 0


def test_goodplaces_single_datum():
    res = run("goodplaces", "--satake", "1,2;1,3;1,5", "--m", "1/2", "--json")
    assert res.exit_code == 0 and json.loads(res.output)["case"] == 1


def test_fe_check_exit_codes():
    assert run("fe-check", "--epsilon", "tate").exit_code == 0
    assert run("fe-check").exit_code == 1


def test_eisenstein_command():
    res = run("eisenstein", "--B", "2,-3,0,6,-2,3", "--B", "1,0,0,1,0,-1", "--json")
    rows = json.loads(res.output)["rows"]
    assert res.exit_code == 0 and ExactScalar.parse(rows[1]["value"]).is_zero()
    assert run("eisenstein", "--phi", "unit").exit_code == 1


def test_sym3_command():
    res = run("sym3", "--newform", DATA / "toy.json", "--p", 2)
    assert res.exit_code == 0 and "PASS" in res.output


def test_zeta_verify_command():
    res = run("zeta-verify", "--variant", 2, "--order", 4, "--samples", 1, "--json")
    assert res.exit_code == 0 and json.loads(res.output)["ok"]


def test_lvalue_command_json():
    res = run("lvalue", "--newform", DATA / "11a.json", "--prime-cut", 20, "--json")
    data = json.loads(res.output)
    assert res.exit_code == 0 and data["primes_used"][:3] == [2, 3, 5]
