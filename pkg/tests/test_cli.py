from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from wbring import cli, verify
from wbring.exactmath import MultiPoly
from wbring.poset import build_finite_abelian, poset_from_json
from wbring.rings import RingVector, StructureTable


def run(*argv):
    buf = io.StringIO()
    code = cli.run(list(argv), stdout=buf)
    return code, buf.getvalue()


@pytest.fixture
def klein_ones(tmp_path):
    path = tmp_path / "ones.json"
    path.write_text(json.dumps({"poset": {"kind": "abelian", "invariants": [2, 2]}, "entries": [1] * 5}))
    return str(path)


@pytest.fixture
def cyc6(tmp_path):
    path = tmp_path / "v6.json"
    doc = {"poset": {"kind": "cyclic", "divisors": [1, 2, 3, 6]}, "kind": "witt", "ring": "Z", "entries": [1, 2, 3, 4]}
    path.write_text(json.dumps(doc))
    return str(path)


def test_necklace_csv():
    code, out = run("necklace", "--cyclic", "12", "--symbolic")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["element", "polynomial"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4", "6", "12"]
    assert rows[2][1] == "1/2*q*x^2 - 1/2*q*x"


def test_necklace_json_roundtrip():
    code, out = run("necklace", "--cyclic", "6", "--format", "json", "--q", "2")
    doc = json.loads(out)
    f = MultiPoly.from_json(doc["orbit_sums"]["2"])
    assert f == (2 * MultiPoly.var("x") ** 2 - 2 * MultiPoly.var("x")) / 2


def test_ghost_klein_classical(tmp_path, klein_ones):
    code, out = run("ghost", "--vector", klein_ones, "--q", "1")
    assert code == 0
    g = RingVector.from_json(json.loads(out))
    assert g.kind == "ghost" and g.entries == (1, 3, 3, 3, 11)


def test_vector_roundtrip_and_determinism(tmp_path, cyc6):
    for verb in ("tau", "neg"):
        code, first = run(verb, "--vector", cyc6, "--q", "2")
        _, second = run(verb, "--vector", cyc6, "--q", "2")
        assert code == 0 and first == second
        v = RingVector.from_json(json.loads(first))
        assert json.dumps(v.to_json(), sort_keys=True, indent=2) + "\n" == first
    out_file = tmp_path / "t.json"
    assert run("tau", "--vector", cyc6, "--q", "2", "--out", str(out_file))[0] == 0
    code, back = run("tau", "--inverse", "--vector", str(out_file), "--q", "2")
    assert RingVector.from_json(json.loads(back)).entries == (1, 2, 3, 4)


def test_add_mul(cyc6):
    code, out = run("add", "--vector", cyc6, "--vector", cyc6, "--q", "1", "--format", "csv")
    assert code == 0 and out.splitlines()[1] == "1,2"
    code, out = run("mul", "--vector", cyc6, "--vector", cyc6, "--q", "3")
    assert code == 0 and RingVector.from_json(json.loads(out))[0] == 1


def test_structure_roundtrip():
    code, out = run("structure", "--cyclic", "4")
    t = StructureTable.from_json(json.loads(out))
    assert str(t.s[0]) == "x[1] + y[1]"


def test_poset_and_pcoeffs():
    code, out = run("poset", "--abelian", "2,2")
    doc = json.loads(out)
    assert poset_from_json(doc["poset"]) == build_finite_abelian([2, 2])
    assert doc["bold_mu_integral"] is True
    code, out = run("pcoeffs", "--cyclic", "2", "--format", "csv")
    assert "2,1,1,1/2*q^2 - 1/2*q" in out.splitlines()


def test_frobenius_and_lenart(cyc6):
    code, out = run("frobenius", "--r", "2", "--vector", cyc6, "--q", "2", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "element,value"
    code, out = run("frobenius", "--r", "2", "--cyclic", "4", "--format", "csv")
    assert "4,1,1/2*q^3 - 1/2*q^2,4" in out.splitlines()
    code, out = run("lenart", "--r", "2", "--n", "4", "--format", "csv")
    assert out.splitlines()[1:] == ["2,4,1,1/4*q^7 - 1/2*q^4 + 1/4*q^3", "2,4,2,1/2*q^5 - 1/2*q^3", "2,4,4,q^4"]


def test_classify():
    code, out = run("classify", "--cyclic", "4", "--q", "2", "--r", "1")
    doc = json.loads(out)
    assert code == 0 and doc["exists"] is False and doc["obstruction_primes"] == [2]


def test_verify_exit_codes(monkeypatch):
    code, out = run("verify", "classify")
    assert code == 0 and json.loads(out)["status"] == "pass"
    bad = lambda: [verify._report("broken", "none", {}, False)]  # noqa: E731
    monkeypatch.setitem(verify.SUITES, "classify", bad)
    assert run("verify", "classify")[0] == 1


def test_verify_lenart_params():
    code, _ = run("verify", "lenart", "--rmax", "3", "--nmax", "6")
    assert code == 0


def test_usage_errors(tmp_path, cyc6):
    assert run("nonsense")[0] == 2
    assert run("ghost", "--q", "1")[0] == 2  # missing --vector
    assert run("poset")[0] == 2  # no poset source
    assert run("add", "--vector", cyc6)[0] == 2  # one vector only
    assert run("necklace", "--cyclic", "4", "--q", "x")[0] == 2
    missing = tmp_path / "missing.json"
    assert run("ghost", "--vector", str(missing))[0] == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "wbring", "lenart", "--r", "1", "--n", "3", "--format", "csv"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[-1] == "1,3,3,1"
